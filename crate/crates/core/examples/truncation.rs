//! Entropy truncation: which training points survive at a few levels of tau,
//! and how Dr.k-NN accuracy changes when only they vote.

use drknn::classifiers::truncate;
use drknn::data::bundled;
use drknn::eval::{compare, lfd_weights, ClassifierConfig, EmbeddingConfig, EpisodeSpec, Protocol, RadiusChoice};
use drknn::lfd::RadiusVector;

fn main() -> Result<(), drknn::Error> {
    let data = bundled("six_point")?;
    let weights = lfd_weights(&data, &RadiusVector::uniform(2, 0.3)?)?;
    for tau in [0.0, 0.5, 0.9, 1.0] {
        let t = truncate(&weights, tau)?;
        println!("six_point tau {tau}: kept {:?}", t.kept_indices);
    }

    let protocol = Protocol {
        episode: EpisodeSpec {
            class_count: 2,
            shots: 25,
            query_count: 100,
            seed: 0,
        },
        episodes: 10,
        embedding: EmbeddingConfig::default(),
        jobs: 0,
    };
    let radius = RadiusChoice::fixed(0.2);
    let mut configs = vec![ClassifierConfig::DrKnn {
        k: 5,
        radius: radius.clone(),
    }];
    for tau in [0.5, 0.8, 0.9] {
        configs.push(ClassifierConfig::Truncated {
            k: 5,
            tau,
            radius: radius.clone(),
        });
    }
    let reports = compare(&bundled("gaussian_noisy")?, &protocol, &configs)?;
    for (config, r) in configs.iter().zip(&reports) {
        let kept = r
            .kept
            .as_ref()
            .map_or(1.0, |k| k.iter().sum::<usize>() as f64 / (k.len() * 50) as f64);
        let label = match config {
            ClassifierConfig::Truncated { tau, .. } => format!("tau {tau}"),
            _ => "untruncated".into(),
        };
        println!(
            "{label:12} accuracy {:.3} ± {:.3}, kept fraction {kept:.2}",
            r.mean, r.std
        );
    }
    Ok(())
}
