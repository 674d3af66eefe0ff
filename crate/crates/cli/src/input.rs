//! Built-in state specs and density-matrix files.

use std::path::Path;

use anyhow::{bail, ensure, Context};
use superact_core::state::{noise_model_state, noisy_bell, noisy_ghz, noisy_w};
use superact_core::DensityMatrix;

fn numbers(args: &str, expected: usize, spec: &str) -> anyhow::Result<Vec<f64>> {
    let values = args
        .split(',')
        .map(|t| t.trim().parse::<f64>().with_context(|| format!("`{t}` in `{spec}` is not a number")))
        .collect::<anyhow::Result<Vec<f64>>>()?;
    ensure!(values.len() == expected, "`{spec}` needs {expected} parameter(s)");
    Ok(values)
}

/// `noisy-ghz:p`, `noisy-w:p`, `noisy-bell:p`, `noise-model:p,q,r`, or a path to a
/// `{"n_qubits", "re", "im"}` JSON file.
pub fn load_state(spec: &str) -> anyhow::Result<DensityMatrix> {
    if let Some((family, args)) = spec.split_once(':') {
        let state = match family {
            "noisy-ghz" => Some(noisy_ghz(numbers(args, 1, spec)?[0])),
            "noisy-w" => Some(noisy_w(numbers(args, 1, spec)?[0])),
            "noisy-bell" => Some(noisy_bell(numbers(args, 1, spec)?[0])),
            "noise-model" => {
                let v = numbers(args, 3, spec)?;
                Some(noise_model_state(v[0], v[1], v[2]))
            }
            _ => None,
        };
        if let Some(state) = state {
            return state.with_context(|| format!("state `{spec}`"));
        }
    }
    let path = Path::new(spec);
    if !path.is_file() {
        bail!("`{spec}` is neither a built-in state spec nor a readable file");
    }
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    DensityMatrix::from_json_str(&text).with_context(|| format!("invalid density matrix in {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins() {
        assert_eq!(load_state("noisy-ghz:0.5").unwrap(), noisy_ghz(0.5).unwrap());
        assert_eq!(load_state("noisy-w:0.6").unwrap(), noisy_w(0.6).unwrap());
        assert_eq!(
            load_state("noise-model:0.5,0.9084,0.9210").unwrap(),
            noise_model_state(0.5, 0.9084, 0.9210).unwrap()
        );
        assert!(load_state("noisy-ghz:1.5").is_err());
        assert!(load_state("noisy-ghz:a").is_err());
        assert!(load_state("noise-model:0.5,0.9").is_err());
        assert!(load_state("nothing-here.json").is_err());
    }
}
