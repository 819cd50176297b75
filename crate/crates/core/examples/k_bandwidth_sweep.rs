//! Paired sensitivity sweeps: Dr.k-NN over k and kernel smoothing over the
//! bandwidth h.

use drknn::data::bundled;
use drknn::eval::{sweep, ClassifierConfig, EmbeddingConfig, EpisodeSpec, Protocol, RadiusChoice, SweepParameter};

fn main() -> Result<(), drknn::Error> {
    let source = bundled("gaussian_noisy")?;
    let protocol = Protocol {
        episode: EpisodeSpec {
            class_count: 2,
            shots: 5,
            query_count: 100,
            seed: 0,
        },
        episodes: 30,
        embedding: EmbeddingConfig::default(),
        jobs: 0,
    };

    let ks: Vec<f64> = (1..=8).map(f64::from).collect();
    let drknn = ClassifierConfig::DrKnn {
        k: 1,
        radius: RadiusChoice::default_cv(),
    };
    println!("Dr.k-NN");
    for (k, r) in ks
        .iter()
        .zip(sweep(&source, &protocol, &drknn, SweepParameter::K, &ks)?)
    {
        println!("  k = {k}: {:.3} ± {:.3}", r.mean, r.std);
    }

    let hs: Vec<f64> = (-4..=3).map(|e| 10f64.powi(e)).collect();
    let kernel = ClassifierConfig::Kernel {
        bandwidth: 1.0,
        radius: RadiusChoice::default_cv(),
    };
    println!("kernel smoothing");
    for (h, r) in hs
        .iter()
        .zip(sweep(&source, &protocol, &kernel, SweepParameter::Bandwidth, &hs)?)
    {
        println!("  h = {h:e}: {:.3} ± {:.3}", r.mean, r.std);
    }
    Ok(())
}
