//! Python bindings: parse problems, derive rules, prove goals, and check
//! proof traces from Python.

use std::time::Duration;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use polartab_core::preprocess::preprocess_problem;
use polartab_core::prover::{prove, ProofResult, SearchConfig};
use polartab_core::syntax::NameGen;
use polartab_core::{
    check_proof, reconstruct_rewrites, PreprocessOptions, ProofTrace, Verdict,
};

/// A parsed problem file.
#[pyclass(frozen, name = "Problem")]
struct PyProblem {
    inner: polartab_core::Problem,
}

/// Outcome of a proof attempt.
#[pyclass(frozen, get_all, name = "ProveResult")]
struct PyProveResult {
    /// "proved", "exhausted" or "timeout".
    status: String,
    expansions: usize,
    closures: usize,
    gamma: usize,
    rewrite_steps: usize,
    searched: usize,
    wall_ms: f64,
    /// Serialized proof trace when the goal was proved.
    trace: Option<String>,
}

fn opts(polarize: bool, skolemize: bool, orient: bool) -> PreprocessOptions {
    PreprocessOptions {
        polarize,
        skolemize_rules: skolemize,
        orient_axioms: orient,
    }
}

#[pymethods]
impl PyProblem {
    /// Parse problem text. The name only labels traces and messages.
    #[staticmethod]
    #[pyo3(signature = (text, name = "problem"))]
    fn parse(text: &str, name: &str) -> PyResult<Self> {
        let inner = polartab_core::Problem::parse(name, text)
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyProblem { inner })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    /// One line per derived rewrite rule.
    #[pyo3(signature = (polarize = true, skolemize = true))]
    fn rules(&self, polarize: bool, skolemize: bool) -> PyResult<Vec<String>> {
        let mut gen = NameGen::with_reserved(self.inner.signature_symbols());
        let prep = preprocess_problem(&self.inner, &opts(polarize, skolemize, true), &mut gen)
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(prep.rules.render_lines())
    }

    /// Try to prove the goal; returns a ProveResult.
    #[pyo3(signature = (
        max_gamma = 10,
        rewrite_budget = 10_000,
        timeout = 30.0,
        polarize = true,
        skolemize = true,
        orient = true,
        want_trace = true,
    ))]
    #[allow(clippy::too_many_arguments)]
    fn prove(
        &self,
        max_gamma: usize,
        rewrite_budget: usize,
        timeout: f64,
        polarize: bool,
        skolemize: bool,
        orient: bool,
        want_trace: bool,
    ) -> PyResult<PyProveResult> {
        if max_gamma == 0 || rewrite_budget == 0 || timeout <= 0.0 || timeout.is_nan() {
            return Err(PyValueError::new_err(
                "max_gamma, rewrite_budget and timeout must be positive",
            ));
        }
        let cfg = SearchConfig {
            max_gamma,
            rewrite_budget,
            timeout: Duration::from_secs_f64(timeout),
            ..Default::default()
        };
        let report = prove(&self.inner, &opts(polarize, skolemize, orient), &cfg)
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        let (status, trace) = match report.result {
            ProofResult::Proved(t) => (
                "proved".to_string(),
                want_trace.then(|| t.serialize()),
            ),
            ProofResult::Exhausted { .. } => ("exhausted".to_string(), None),
            ProofResult::Timeout => ("timeout".to_string(), None),
        };
        Ok(PyProveResult {
            status,
            expansions: report.stats.expansions,
            closures: report.stats.closures,
            gamma: report.stats.gamma,
            rewrite_steps: report.stats.rewrite_steps,
            searched: report.stats.searched,
            wall_ms: report.stats.wall.as_secs_f64() * 1e3,
            trace,
        })
    }

    /// Validate a serialized proof trace against this problem.
    /// Returns (valid, message).
    #[pyo3(signature = (trace_text, reconstruct = false, rewrite_budget = 10_000))]
    fn check(
        &self,
        trace_text: &str,
        reconstruct: bool,
        rewrite_budget: usize,
    ) -> PyResult<(bool, String)> {
        let parsed = match ProofTrace::parse(trace_text) {
            Ok(t) => t,
            Err(e) => return Ok((false, e.to_string())),
        };
        let trace = if reconstruct {
            match reconstruct_rewrites(&self.inner, &parsed, rewrite_budget) {
                Ok(t) => t,
                Err(e) => return Ok((false, e.to_string())),
            }
        } else {
            parsed
        };
        match check_proof(&self.inner, &trace) {
            Ok(Verdict::Valid) => Ok((true, "valid".to_string())),
            Ok(Verdict::Invalid { node, reason }) => {
                Ok((false, format!("invalid at node {node}: {reason}")))
            }
            Err(e) => Ok((false, e.to_string())),
        }
    }
}

#[pymodule]
fn polartab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProblem>()?;
    m.add_class::<PyProveResult>()?;
    Ok(())
}
