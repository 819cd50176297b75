//! M-class K-shot episodes on the noisy two-Gaussian benchmark: every method
//! sees the same episodes.

use drknn::data::bundled;
use drknn::eval::{compare, ClassifierConfig, EmbeddingConfig, EpisodeSpec, Protocol, RadiusChoice};

fn main() -> Result<(), drknn::Error> {
    let shots: usize = std::env::args()
        .nth(1)
        .map_or(5, |s| s.parse().expect("shots is an integer"));
    let protocol = Protocol {
        episode: EpisodeSpec {
            class_count: 2,
            shots,
            query_count: 100,
            seed: 0,
        },
        episodes: 30,
        embedding: EmbeddingConfig::default(),
        jobs: 0,
    };
    let methods = [
        ClassifierConfig::DrKnn {
            k: 5,
            radius: RadiusChoice::default_cv(),
        },
        ClassifierConfig::Vanilla { k: 5 },
        ClassifierConfig::InverseDistance { k: 5 },
        ClassifierConfig::Kernel {
            bandwidth: 1.0,
            radius: RadiusChoice::default_cv(),
        },
        ClassifierConfig::UniformRandom,
    ];
    println!("K = {shots}, {} episodes", protocol.episodes);
    for r in compare(&bundled("gaussian_noisy")?, &protocol, &methods)? {
        println!("{:22} {:.3} ± {:.3}", r.classifier, r.mean, r.std);
    }
    Ok(())
}
