//! Network state and the four per-iteration modules: feedforward (FFM-k),
//! error (EM), backpropagation gradients and the momentum weight update
//! (BPM-k), plus the MSE monitor.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Half-width of the uniform initialisation interval.
pub const INIT_SPREAD: f32 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Activation {
    #[default]
    Sigmoid,
    Linear,
}

impl Activation {
    pub fn apply(self, induced: Matrix) -> Matrix {
        match self {
            Activation::Sigmoid => induced.sigmoid(),
            Activation::Linear => induced,
        }
    }

    /// Derivative expressed in terms of the activated output.
    pub fn derivative_from_output(self, output: &Matrix) -> Result<Matrix> {
        match self {
            Activation::Sigmoid => output.sigmoid_derivative(),
            Activation::Linear => Matrix::filled(output.rows(), output.cols(), 1.0),
        }
    }
}

/// A fully connected network in matrix form.
///
/// Layer `k` (1-based in the maths, `k - 1` here) owns a weight matrix of
/// shape `H^k x (H^{k-1} + 1)`; column 0 multiplies the constant `-1` bias row.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpNetwork {
    widths: Vec<usize>,
    weights: Vec<Matrix>,
    momentum: Vec<Matrix>,
    activations: Vec<Activation>,
}

/// Activations `Y^0..Y^L` retained by [`MlpNetwork::forward`] for the backward pass.
#[derive(Debug, Clone)]
pub struct ForwardPass {
    layers: Vec<Matrix>,
}

impl ForwardPass {
    /// `Y^k`; index 0 is the input batch.
    pub fn layer(&self, k: usize) -> &Matrix {
        &self.layers[k]
    }

    pub fn output(&self) -> &Matrix {
        self.layers.last().expect("forward pass has at least the input")
    }

    pub fn into_output(mut self) -> Matrix {
        self.layers.pop().expect("forward pass has at least the input")
    }

    pub fn batch_size(&self) -> usize {
        self.layers[0].cols()
    }
}

fn validate_widths(widths: &[usize]) -> Result<()> {
    if widths.len() < 2 {
        return Err(Error::Config(format!(
            "need at least an input and an output width, got {widths:?}"
        )));
    }
    if widths.contains(&0) {
        return Err(Error::Config(format!("layer widths must be positive, got {widths:?}")));
    }
    Ok(())
}

impl MlpNetwork {
    /// Seeded uniform `[-0.5, 0.5]` weights, zero momentum, sigmoid everywhere.
    pub fn init(widths: &[usize], seed: u64) -> Result<Self> {
        validate_widths(widths)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut weights = Vec::with_capacity(widths.len() - 1);
        for pair in widths.windows(2) {
            let (fan_in, fan_out) = (pair[0] + 1, pair[1]);
            let values = (0..fan_out * fan_in)
                .map(|_| rng.gen_range(-INIT_SPREAD..=INIT_SPREAD))
                .collect();
            weights.push(Matrix::new(fan_out, fan_in, values)?);
        }
        let activations = vec![Activation::Sigmoid; weights.len()];
        Self::from_parts(widths.to_vec(), weights, activations)
    }

    /// Assembles a network from explicit weights with zeroed momentum.
    pub fn from_parts(widths: Vec<usize>, weights: Vec<Matrix>, activations: Vec<Activation>) -> Result<Self> {
        validate_widths(&widths)?;
        let layers = widths.len() - 1;
        if weights.len() != layers || activations.len() != layers {
            return Err(Error::Config(format!(
                "{layers} layers need {layers} weight matrices and activations, got {} and {}",
                weights.len(),
                activations.len()
            )));
        }
        for (k, w) in weights.iter().enumerate() {
            if w.rows() != widths[k + 1] || w.cols() != widths[k] + 1 {
                return Err(Error::Config(format!(
                    "layer {} weights are {}, expected {}x{}",
                    k + 1,
                    w.shape(),
                    widths[k + 1],
                    widths[k] + 1
                )));
            }
        }
        let momentum = weights
            .iter()
            .map(|w| Matrix::zeros(w.rows(), w.cols()))
            .collect::<Result<_>>()?;
        Ok(Self {
            widths,
            weights,
            momentum,
            activations,
        })
    }

    pub fn with_activation(mut self, layer: usize, activation: Activation) -> Self {
        self.activations[layer] = activation;
        self
    }

    /// `H^0..H^L`.
    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    /// Number of weight layers `L`.
    pub fn depth(&self) -> usize {
        self.weights.len()
    }

    pub fn inputs(&self) -> usize {
        self.widths[0]
    }

    pub fn outputs(&self) -> usize {
        *self.widths.last().unwrap()
    }

    pub fn weights(&self) -> &[Matrix] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [Matrix] {
        &mut self.weights
    }

    /// Previous update `ΔW^k(n-1)` per layer.
    pub fn momentum(&self) -> &[Matrix] {
        &self.momentum
    }

    pub fn activations(&self) -> &[Activation] {
        &self.activations
    }

    pub fn reset_momentum(&mut self) {
        for m in &mut self.momentum {
            m.as_mut_slice().fill(0.0);
        }
    }

    /// Runs FFM-k for `k = 1..L`, keeping every intermediate `Y^k`.
    pub fn forward(&self, inputs: &Matrix) -> Result<ForwardPass> {
        if inputs.rows() != self.inputs() {
            return Err(Error::InvalidShape(format!(
                "network expects {} input rows, got {}",
                self.inputs(),
                inputs.rows()
            )));
        }
        let mut layers = Vec::with_capacity(self.depth() + 1);
        layers.push(inputs.clone());
        for (w, &act) in self.weights.iter().zip(&self.activations) {
            let next = ffm(w, act, layers.last().unwrap())?;
            layers.push(next);
        }
        Ok(ForwardPass { layers })
    }

    /// Forward pass returning only `Y^L`.
    pub fn predict(&self, inputs: &Matrix) -> Result<Matrix> {
        Ok(self.forward(inputs)?.into_output())
    }

    /// Local gradients `g^1..g^L` (index `k - 1` holds `g^k`).
    pub fn backprop_gradients(&self, pass: &ForwardPass, error: &Matrix) -> Result<Vec<Matrix>> {
        let depth = self.depth();
        let mut grads = Vec::with_capacity(depth);
        grads.push(self.output_gradient(pass, error)?);
        for k in (1..depth).rev() {
            let g = self.hidden_gradient(k, pass, grads.last().unwrap())?;
            grads.push(g);
        }
        grads.reverse();
        Ok(grads)
    }

    /// `g^L = φ'(Y^L) ⊙ E`.
    pub fn output_gradient(&self, pass: &ForwardPass, error: &Matrix) -> Result<Matrix> {
        let out = pass.output();
        if error.rows() != out.rows() || error.cols() != out.cols() {
            return Err(Error::Shape {
                op: "backprop_gradients",
                left: out.shape(),
                right: error.shape(),
            });
        }
        self.activations[self.depth() - 1]
            .derivative_from_output(out)?
            .hadamard(error)
    }

    /// `g^k` for a hidden layer `1 <= k < L`, given `g^{k+1}`.
    ///
    /// The back-projection `[W^{k+1}]ᵀ g^{k+1}` has a leading bias row; it is
    /// discarded before the element-wise product with `φ'(Y^k)`.
    pub fn hidden_gradient(&self, k: usize, pass: &ForwardPass, upstream: &Matrix) -> Result<Matrix> {
        let projected = self.weights[k].transpose().product(upstream)?.drop_first_row()?;
        self.activations[k - 1]
            .derivative_from_output(pass.layer(k))?
            .hadamard(&projected)
    }

    /// Weight update with momentum:
    /// `ΔW^k = (η/ℕ) g^k [-1; Y^{k-1}]ᵀ + α ΔW^k(n-1)`, then `W^k += ΔW^k`.
    pub fn bpm(&mut self, grads: &[Matrix], pass: &ForwardPass, eta: f32, alpha: f32) -> Result<()> {
        if grads.len() != self.depth() {
            return Err(Error::InvalidShape(format!(
                "expected {} gradient matrices, got {}",
                self.depth(),
                grads.len()
            )));
        }
        for (k, g) in grads.iter().enumerate() {
            self.update_layer(k + 1, g, pass, eta, alpha)?;
        }
        Ok(())
    }

    /// BPM for a single layer `k` (1-based).
    pub fn update_layer(&mut self, k: usize, grad: &Matrix, pass: &ForwardPass, eta: f32, alpha: f32) -> Result<()> {
        let rate = eta / pass.batch_size() as f32;
        let step = grad.product(&pass.layer(k - 1).augment_bias().transpose())?;
        let delta = step.scale(rate).add(&self.momentum[k - 1].scale(alpha))?;
        self.weights[k - 1] = self.weights[k - 1].add(&delta)?;
        self.momentum[k - 1] = delta;
        Ok(())
    }

    /// `∂MSE/∂W^k` for the loss `(1/2ℕ)·trace(EᵀE)`, i.e. `-(1/ℕ) g^k [-1; Y^{k-1}]ᵀ`.
    pub fn loss_gradients(&self, pass: &ForwardPass, error: &Matrix) -> Result<Vec<Matrix>> {
        let scale = -1.0 / pass.batch_size() as f32;
        self.backprop_gradients(pass, error)?
            .iter()
            .enumerate()
            .map(|(k, g)| Ok(g.product(&pass.layer(k).augment_bias().transpose())?.scale(scale)))
            .collect()
    }
}

/// FFM-k: `Y^k = φ(W^k · [-1; Y^{k-1}])`.
pub fn ffm(weights: &Matrix, activation: Activation, previous: &Matrix) -> Result<Matrix> {
    Ok(activation.apply(weights.product(&previous.augment_bias())?))
}

/// EM: `E = D - Y^L`.
pub fn em(output: &Matrix, targets: &Matrix) -> Result<Matrix> {
    targets.sub(output).map_err(|_| Error::Shape {
        op: "em",
        left: output.shape(),
        right: targets.shape(),
    })
}

/// `(1/2ℕ)·trace(EᵀE)`.
pub fn mse(error: &Matrix, samples: usize) -> Result<f32> {
    if error.cols() != samples {
        return Err(Error::InvalidShape(format!(
            "error matrix has {} columns but sample count is {samples}",
            error.cols()
        )));
    }
    Ok(error.trace_product(error)? / (2.0 * samples as f32))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f32]]) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    fn xor_inputs() -> Matrix {
        m(&[&[0.0, 0.0, 1.0, 1.0], &[0.0, 1.0, 0.0, 1.0]])
    }

    #[test]
    fn init_is_deterministic_with_expected_shapes() {
        let a = MlpNetwork::init(&[2, 38, 1], 7).unwrap();
        let b = MlpNetwork::init(&[2, 38, 1], 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.weights()[0].shape(), crate::error::Shape(38, 3));
        assert_eq!(a.weights()[1].shape(), crate::error::Shape(1, 39));
        assert!(a.momentum().iter().all(|m| m.as_slice().iter().all(|&v| v == 0.0)));
        assert!(a
            .weights()
            .iter()
            .all(|w| w.as_slice().iter().all(|v| v.abs() <= INIT_SPREAD)));
        assert_ne!(a, MlpNetwork::init(&[2, 38, 1], 8).unwrap());
    }

    #[test]
    fn init_rejects_bad_widths() {
        assert!(matches!(MlpNetwork::init(&[2], 0), Err(Error::Config(_))));
        assert!(matches!(MlpNetwork::init(&[2, 0, 1], 0), Err(Error::Config(_))));
    }

    #[test]
    fn ffm_zero_weights_gives_half() {
        let y = ffm(&Matrix::zeros(3, 3).unwrap(), Activation::Sigmoid, &xor_inputs()).unwrap();
        assert!(y.as_slice().iter().all(|&v| v == 0.5));
        assert_eq!((y.rows(), y.cols()), (3, 4));
    }

    #[test]
    fn ffm_linear_identity_passthrough() {
        let w = m(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        let x = xor_inputs();
        assert_eq!(ffm(&w, Activation::Linear, &x).unwrap(), x);
    }

    #[test]
    fn ffm_matches_hand_evaluation_on_xor() {
        // Classic hand-built XOR: h1 = OR, h2 = AND, out = h1 AND NOT h2.
        let w1 = m(&[&[10.0, 20.0, 20.0], &[30.0, 20.0, 20.0]]);
        let w2 = m(&[&[10.0, 20.0, -20.0]]);
        let net = MlpNetwork::from_parts(vec![2, 2, 1], vec![w1, w2], vec![Activation::Sigmoid; 2]).unwrap();
        let pass = net.forward(&xor_inputs()).unwrap();

        let sig = |v: f64| 1.0 / (1.0 + (-v).exp());
        let cols = [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)];
        for (s, &(a, b)) in cols.iter().enumerate() {
            let h1 = sig(-10.0 + 20.0 * a + 20.0 * b);
            let h2 = sig(-30.0 + 20.0 * a + 20.0 * b);
            let o = sig(-10.0 + 20.0 * h1 - 20.0 * h2);
            assert!((pass.layer(1).get(0, s) as f64 - h1).abs() < 1e-6);
            assert!((pass.layer(1).get(1, s) as f64 - h2).abs() < 1e-6);
            assert!((pass.output().get(0, s) as f64 - o).abs() < 1e-5);
        }
        let out = pass.output().as_slice();
        assert!(out[0] < 0.5 && out[1] > 0.5 && out[2] > 0.5 && out[3] < 0.5);
    }

    #[test]
    fn forward_depth_one_is_single_ffm() {
        let net = MlpNetwork::init(&[2, 3], 1).unwrap();
        let x = xor_inputs();
        assert_eq!(
            net.predict(&x).unwrap(),
            ffm(&net.weights()[0], Activation::Sigmoid, &x).unwrap()
        );
    }

    #[test]
    fn forward_identical_columns_give_identical_outputs() {
        let net = MlpNetwork::init(&[3, 4, 2], 3).unwrap();
        let x = Matrix::from_rows(&[[0.3f32; 5], [1.2; 5], [-0.7; 5]]).unwrap();
        let y = net.predict(&x).unwrap();
        for s in 1..5 {
            assert_eq!(y.column(s), y.column(0));
        }
        assert!(net.predict(&Matrix::zeros(2, 5).unwrap()).is_err());
    }

    #[test]
    fn em_examples() {
        let d = m(&[&[1.0, 0.0, 0.0, 1.0]]);
        let y = m(&[&[0.9, 0.1, 0.2, 0.7]]);
        let e = em(&y, &d).unwrap();
        let expected = [1.0f32 - 0.9, 0.0 - 0.1, 0.0 - 0.2, 1.0 - 0.7];
        assert_eq!(e.as_slice(), &expected);
        for (got, want) in e.as_slice().iter().zip([0.1, -0.1, -0.2, 0.3]) {
            assert!((got - want).abs() < 1e-6);
        }
        let zero = em(&d, &d).unwrap();
        assert_eq!(mse(&zero, 4).unwrap(), 0.0);
        assert!(matches!(em(&y, &Matrix::zeros(2, 4).unwrap()), Err(Error::Shape { op: "em", .. })));
    }

    #[test]
    fn mse_examples() {
        assert_eq!(mse(&m(&[&[1.0, -1.0]]), 2).unwrap(), 0.5);
        assert_eq!(mse(&Matrix::zeros(2, 3).unwrap(), 3).unwrap(), 0.0);
        let e = m(&[&[0.3, -0.2], &[0.1, 0.4]]);
        let base = mse(&e, 2).unwrap();
        assert!((mse(&e.scale(3.0), 2).unwrap() - 9.0 * base).abs() < 1e-6);
        assert!(mse(&e, 3).is_err());
    }

    #[test]
    fn zero_error_gives_zero_gradients() {
        let net = MlpNetwork::init(&[2, 4, 3, 1], 5).unwrap();
        let pass = net.forward(&xor_inputs()).unwrap();
        let grads = net.backprop_gradients(&pass, &Matrix::zeros(1, 4).unwrap()).unwrap();
        assert_eq!(grads.len(), 3);
        assert_eq!(grads[0].shape(), crate::error::Shape(4, 4));
        assert_eq!(grads[1].shape(), crate::error::Shape(3, 4));
        assert!(grads.iter().all(|g| g.as_slice().iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn saturated_outputs_have_vanishing_gradient() {
        let w1 = m(&[&[0.0, 0.0, 0.0]]);
        let w2 = m(&[&[-60.0, 0.0]]);
        let net = MlpNetwork::from_parts(vec![2, 1, 1], vec![w1, w2], vec![Activation::Sigmoid; 2]).unwrap();
        let pass = net.forward(&xor_inputs()).unwrap();
        let e = Matrix::filled(1, 4, -1.0).unwrap();
        let grads = net.backprop_gradients(&pass, &e).unwrap();
        assert!(grads[1].as_slice().iter().all(|v| v.abs() < 1e-6));
    }

    #[test]
    fn bpm_fixed_point_without_gradient() {
        let mut net = MlpNetwork::init(&[2, 3, 1], 9).unwrap();
        let before = net.clone();
        let pass = net.forward(&xor_inputs()).unwrap();
        let zeros: Vec<Matrix> = net
            .weights()
            .iter()
            .map(|w| Matrix::zeros(w.rows(), 4).unwrap())
            .collect();
        net.bpm(&zeros, &pass, 0.9, 0.8).unwrap();
        assert_eq!(net.weights(), before.weights());
    }

    #[test]
    fn bpm_unit_rate_is_plain_outer_product() {
        let mut net = MlpNetwork::init(&[2, 3, 1], 11).unwrap();
        let x = xor_inputs();
        let d = m(&[&[0.0, 1.0, 1.0, 0.0]]);
        let pass = net.forward(&x).unwrap();
        let e = em(pass.output(), &d).unwrap();
        let grads = net.backprop_gradients(&pass, &e).unwrap();
        let before = net.weights().to_vec();
        net.bpm(&grads, &pass, 4.0, 0.0).unwrap();
        for k in 0..2 {
            let expected = grads[k].product(&pass.layer(k).augment_bias().transpose()).unwrap();
            assert_eq!(net.momentum()[k], expected);
            assert_eq!(net.weights()[k], before[k].add(&expected).unwrap());
        }
    }

    #[test]
    fn momentum_carries_previous_delta() {
        let mut net = MlpNetwork::init(&[2, 2, 1], 4).unwrap();
        let x = xor_inputs();
        let d = m(&[&[0.0, 1.0, 1.0, 0.0]]);
        let pass = net.forward(&x).unwrap();
        let grads = net.backprop_gradients(&pass, &em(pass.output(), &d).unwrap()).unwrap();
        net.bpm(&grads, &pass, 0.5, 0.0).unwrap();
        let first = net.momentum().to_vec();

        let zeros: Vec<Matrix> = grads.iter().map(|g| Matrix::zeros(g.rows(), g.cols()).unwrap()).collect();
        let w = net.weights().to_vec();
        net.bpm(&zeros, &pass, 0.5, 0.5).unwrap();
        for k in 0..2 {
            assert_eq!(net.momentum()[k], first[k].scale(0.5));
            assert_eq!(net.weights()[k], w[k].add(&first[k].scale(0.5)).unwrap());
        }
    }

    #[test]
    fn delta_rule_matches_two_weight_perceptron() {
        // Single sigmoid neuron with one input plus bias, α = 0.
        let (mut bias_w, mut in_w) = (0.2f32, -0.4f32);
        let w = m(&[&[bias_w, in_w]]);
        let mut net = MlpNetwork::from_parts(vec![1, 1], vec![w], vec![Activation::Sigmoid]).unwrap();
        let x = m(&[&[0.8]]);
        let d = m(&[&[1.0]]);
        let eta = 0.5f32;
        for _ in 0..5 {
            let y = crate::matrix::sigmoid(-bias_w + in_w * 0.8);
            let delta = (1.0 - y) * y * (1.0 - y);
            bias_w += eta * delta * -1.0;
            in_w += eta * delta * 0.8;

            let pass = net.forward(&x).unwrap();
            let grads = net.backprop_gradients(&pass, &em(pass.output(), &d).unwrap()).unwrap();
            net.bpm(&grads, &pass, eta, 0.0).unwrap();
        }
        let got = net.weights()[0].as_slice();
        assert!((got[0] - bias_w).abs() < 1e-6 && (got[1] - in_w).abs() < 1e-6, "{got:?}");
    }
}
