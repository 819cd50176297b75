//! Linear feature maps fitted per episode: raw features against PCA and SVD
//! projections, with vanilla k-NN and Dr.k-NN on top.

use drknn::data::{gaussian_classes, GaussianSpec};
use drknn::embedding::fit_pca;
use drknn::eval::{compare, ClassifierConfig, EmbeddingConfig, EpisodeSpec, Protocol, RadiusChoice};

fn main() -> Result<(), drknn::Error> {
    // Three informative dimensions padded with five of pure noise.
    let source = gaussian_classes(&GaussianSpec {
        classes: 3,
        per_class: 120,
        dim: 8,
        separation: 3.0,
        label_noise: 0.1,
        seed: 2,
    })?;
    let pca = fit_pca(&source, 3)?;
    let explained: Vec<String> = pca.variance_explained.iter().map(|v| format!("{v:.2}")).collect();
    println!(
        "PCA on the whole source, variance of top 3 components: {}",
        explained.join(", ")
    );

    let methods = [
        ClassifierConfig::Vanilla { k: 3 },
        ClassifierConfig::DrKnn {
            k: 3,
            radius: RadiusChoice::default_cv(),
        },
    ];
    for embedding in ["none", "pca:2", "svd:2"] {
        let protocol = Protocol {
            episode: EpisodeSpec {
                class_count: 3,
                shots: 5,
                query_count: 60,
                seed: 0,
            },
            episodes: 20,
            embedding: embedding.parse::<EmbeddingConfig>()?,
            jobs: 0,
        };
        for r in compare(&source, &protocol, &methods)? {
            println!("{embedding:10} {:12} {:.3} ± {:.3}", r.classifier, r.mean, r.std);
        }
    }
    Ok(())
}
