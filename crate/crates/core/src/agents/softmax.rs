/// `pᵢ = exp(vᵢ/τ) / Σⱼ exp(vⱼ/τ)`, shifted by the maximum so large
/// values cannot overflow.
pub fn softmax(values: &[f64], temperature: f64) -> Vec<f64> {
    assert!(!values.is_empty(), "softmax of an empty list");
    assert!(temperature > 0.0, "temperature must be positive");
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = values.iter().map(|v| ((v - max) / temperature).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}
