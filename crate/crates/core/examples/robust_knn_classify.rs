//! Fits Dr.k-NN with a cross-validated radius on one noisy training sample
//! and compares its predictions with plain k-NN on held-out points.

use drknn::data::{gaussian_classes, GaussianSpec};
use drknn::eval::{fit, sample_episode, ClassifierConfig, EmbeddingConfig, EpisodeSpec, RadiusChoice};

fn main() -> Result<(), drknn::Error> {
    let source = gaussian_classes(&GaussianSpec {
        per_class: 100,
        label_noise: 0.2,
        seed: 3,
        ..Default::default()
    })?;
    let episode = sample_episode(
        &source,
        &EpisodeSpec {
            class_count: 2,
            shots: 10,
            query_count: 150,
            seed: 5,
        },
    )?;
    let truth: Vec<usize> = episode.queries.labels().collect();

    for config in [
        ClassifierConfig::DrKnn {
            k: 5,
            radius: RadiusChoice::default_cv(),
        },
        ClassifierConfig::Vanilla { k: 5 },
    ] {
        let mut model = fit(&config, &EmbeddingConfig::default(), &episode.train, 0)?;
        let predicted = model.predict(&episode.queries)?;
        let hits = predicted.iter().zip(&truth).filter(|(p, t)| p == t).count();
        print!("{:12} accuracy {:.3}", config.id(), hits as f64 / truth.len() as f64);
        match &model.radius {
            Some(r) => println!("  (radius {:?})", r.as_slice()),
            None => println!(),
        }
    }
    Ok(())
}
