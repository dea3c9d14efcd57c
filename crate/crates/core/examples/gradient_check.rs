//! Compares backpropagated gradients of a small sigmoid network against
//! central finite differences.

use ndae_ids::neural::{Activation, Network};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let net = Network::init(&[4, 6, 3, 4], &[Activation::Sigmoid, Activation::Sigmoid, Activation::Linear], 42)?;
    let x = [0.1, 0.9, 0.4, 0.0];
    let target = [0.2, 0.7, 0.4, 0.1];
    let grads = net.backward(&x, &target)?;

    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for (li, layer) in net.layers().iter().enumerate() {
        for p in 0..layer.parameter_count() {
            let loss_at = |delta: f64| -> Result<f64, Box<dyn std::error::Error>> {
                let mut shifted = net.clone();
                *shifted.layers_mut()[li].parameter_mut(p) += delta;
                Ok(ndae_ids::neural::mse_loss(&shifted.predict(&x)?, &target)?)
            };
            let numeric = (loss_at(h)? - loss_at(-h)?) / (2.0 * h);
            let analytic = grads.layers[li].get(p);
            let rel = (numeric - analytic).abs() / numeric.abs().max(analytic.abs()).max(1e-8);
            worst = worst.max(rel);
        }
    }
    println!("{} parameters checked, worst relative error {worst:.2e}", net.parameter_count());
    Ok(())
}
