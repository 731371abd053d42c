//! Run records and their deterministic text renderings.
//!
//! Every renderer is a pure function of the trace, so re-rendering the same
//! run produces byte-identical files.

use crate::pemf::VesdType;

/// One row per optimizer iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub global_best: f64,
    pub modal_error: f64,
    pub refined: bool,
    pub samples_used: usize,
}

/// One row per refinement check (every τ iterations).
#[derive(Debug, Clone, PartialEq)]
pub struct AmrCheckRecord {
    pub iteration: usize,
    pub q_error: f64,
    pub q_improve: f64,
    pub refine: bool,
    pub epsilon_target: Option<f64>,
    pub modal_error: f64,
    /// (a, b, type) of the VESD fit backing the check.
    pub vesd: Option<(f64, f64, VesdType)>,
}

/// One row per refinement event.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinementEvent {
    pub iteration: usize,
    pub batch_size: usize,
    pub epsilon_target: f64,
    pub points: Vec<Vec<f64>>,
    pub acquisition_values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FinalResult {
    pub point: Vec<f64>,
    pub surrogate_value: f64,
    pub true_value: Option<f64>,
}

/// Full record of one optimization run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunTrace {
    pub iterations: Vec<IterationRecord>,
    pub checks: Vec<AmrCheckRecord>,
    pub events: Vec<RefinementEvent>,
    pub final_result: Option<FinalResult>,
    /// Lowest true response seen, its location included.
    pub best_observed: Option<(Vec<f64>, f64)>,
    /// Checkpoint text of the surrogate the run ended with.
    pub final_surrogate: Option<String>,
    pub evals_used: usize,
    pub budget: usize,
    pub max_iter: usize,
}

/// Full-precision float formatting shared by all emitted files: `.` decimal
/// separator, 17 significant digits.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

impl RunTrace {
    pub fn render_iterations_csv(&self) -> String {
        let mut out = String::from("iter,gbest,modal_error,refined,n_samples\n");
        for r in &self.iterations {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.iteration,
                fmt_float(r.global_best),
                fmt_float(r.modal_error),
                r.refined as u8,
                r.samples_used
            ));
        }
        out
    }

    pub fn render_checks_csv(&self) -> String {
        let mut out =
            String::from("iter,q_error,q_improve,refine,epsilon_target,modal_error,vesd_a,vesd_b,vesd_type\n");
        for c in &self.checks {
            let eps = c.epsilon_target.map(fmt_float).unwrap_or_default();
            let (a, b, t) = match &c.vesd {
                Some((a, b, t)) => (fmt_float(*a), fmt_float(*b), t.to_string()),
                None => (String::new(), String::new(), String::new()),
            };
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                c.iteration,
                fmt_float(c.q_error),
                fmt_float(c.q_improve),
                c.refine as u8,
                eps,
                fmt_float(c.modal_error),
                a,
                b,
                t
            ));
        }
        out
    }

    pub fn render_events_csv(&self) -> String {
        let mut out = String::from("iter,batch_size,epsilon_target\n");
        for e in &self.events {
            out.push_str(&format!(
                "{},{},{}\n",
                e.iteration,
                e.batch_size,
                fmt_float(e.epsilon_target)
            ));
        }
        out
    }

    /// One row per infill point: iteration, index in batch, acquisition
    /// value, then the coordinates.
    pub fn render_batches_csv(&self) -> String {
        let dims = self
            .events
            .first()
            .and_then(|e| e.points.first())
            .map_or(0, Vec::len);
        let mut out = String::from("iter,point_index,acquisition");
        for d in 0..dims {
            out.push_str(&format!(",x{d}"));
        }
        out.push('\n');
        for e in &self.events {
            for (i, (p, a)) in e.points.iter().zip(&e.acquisition_values).enumerate() {
                out.push_str(&format!("{},{},{}", e.iteration, i, fmt_float(*a)));
                for v in p {
                    out.push(',');
                    out.push_str(&fmt_float(*v));
                }
                out.push('\n');
            }
        }
        out
    }

    /// Two-column plot data: iteration vs global best.
    pub fn render_convergence_dat(&self) -> String {
        let mut out = String::new();
        for r in &self.iterations {
            out.push_str(&format!("{} {}\n", r.iteration, fmt_float(r.global_best)));
        }
        out
    }

    /// Two-column plot data: iteration vs modal surrogate error.
    pub fn render_model_error_dat(&self) -> String {
        let mut out = String::new();
        for r in &self.iterations {
            out.push_str(&format!("{} {}\n", r.iteration, fmt_float(r.modal_error)));
        }
        out
    }

    /// JSON summary: final point/values, evaluation count, refinement
    /// events.
    pub fn render_summary(&self) -> String {
        let mut out = String::from("{\n");
        out.push_str(&format!("  \"evals_used\": {},\n", self.evals_used));
        out.push_str(&format!("  \"budget\": {},\n", self.budget));
        out.push_str(&format!(
            "  \"iterations\": {},\n",
            self.iterations.len()
        ));
        match &self.final_result {
            Some(f) => {
                let coords: Vec<String> = f.point.iter().map(|v| fmt_float(*v)).collect();
                out.push_str(&format!(
                    "  \"final\": {{\"point\": [{}], \"surrogate_value\": {}, \"true_value\": {}}},\n",
                    coords.join(", "),
                    fmt_float(f.surrogate_value),
                    f.true_value.map_or("null".into(), fmt_float)
                ));
            }
            None => out.push_str("  \"final\": null,\n"),
        }
        out.push_str("  \"refinements\": [");
        let events: Vec<String> = self
            .events
            .iter()
            .map(|e| {
                format!(
                    "{{\"iteration\": {}, \"batch_size\": {}, \"epsilon_target\": {}}}",
                    e.iteration,
                    e.batch_size,
                    fmt_float(e.epsilon_target)
                )
            })
            .collect();
        out.push_str(&events.join(", "));
        out.push_str("]\n}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_trace() -> RunTrace {
        RunTrace {
            iterations: vec![
                IterationRecord {
                    iteration: 1,
                    global_best: 2.5,
                    modal_error: 0.125,
                    refined: false,
                    samples_used: 20,
                },
                IterationRecord {
                    iteration: 12,
                    global_best: 1.25,
                    modal_error: 0.03125,
                    refined: true,
                    samples_used: 49,
                },
            ],
            checks: vec![AmrCheckRecord {
                iteration: 12,
                q_error: 0.25,
                q_improve: 0.0625,
                refine: true,
                epsilon_target: Some(0.0625),
                modal_error: 0.125,
                vesd: Some((0.5, -0.0625, VesdType::Type1)),
            }],
            events: vec![RefinementEvent {
                iteration: 12,
                batch_size: 29,
                epsilon_target: 0.0625,
                points: vec![vec![0.5, 0.25]],
                acquisition_values: vec![1.5],
            }],
            final_result: Some(FinalResult {
                point: vec![0.5, 0.25],
                surrogate_value: 1.25,
                true_value: Some(1.5),
            }),
            best_observed: Some((vec![0.5, 0.25], 1.5)),
            final_surrogate: None,
            evals_used: 50,
            budget: 60,
            max_iter: 100,
        }
    }

    #[test]
    fn iteration_csv_has_header_and_rows() {
        let csv = tiny_trace().render_iterations_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "iter,gbest,modal_error,refined,n_samples");
        assert_eq!(lines.len(), 3);
        assert!(lines[2].starts_with("12,"));
        assert!(lines[2].ends_with(",1,49"));
    }

    #[test]
    fn empty_trace_renders_headers_only() {
        let t = RunTrace::default();
        assert_eq!(
            t.render_iterations_csv(),
            "iter,gbest,modal_error,refined,n_samples\n"
        );
        assert_eq!(t.render_events_csv(), "iter,batch_size,epsilon_target\n");
    }

    #[test]
    fn event_csv_single_refinement_row() {
        let csv = tiny_trace().render_events_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[1].starts_with("12,29,"));
    }

    #[test]
    fn rendering_is_stable() {
        let t = tiny_trace();
        assert_eq!(t.render_iterations_csv(), t.render_iterations_csv());
        assert_eq!(t.render_summary(), t.render_summary());
        assert_eq!(t.render_batches_csv(), t.render_batches_csv());
    }

    #[test]
    fn floats_carry_full_precision() {
        let s = fmt_float(0.1);
        assert!(s.contains('.'), "decimal point required: {s}");
        let back: f64 = s.parse().unwrap();
        assert_eq!(back, 0.1);
        // At least 10 significant digits.
        let digits = s.chars().filter(|c| c.is_ascii_digit()).count();
        assert!(digits >= 10, "{s}");
    }
}
