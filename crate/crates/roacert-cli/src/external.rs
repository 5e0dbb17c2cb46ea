//! Bridge to external conic solvers. A solver is registered as a shell
//! command template containing `{problem}` and `{solution}` placeholders; the
//! command must read the problem JSON and write a solution JSON.
//!
//! The environment variable `ROACERT_EXTERNAL_SOLVER` registers a template
//! under the name `env` (see `roacert --help`).

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;

use roacert_core::program::ConicProgram;
use roacert_core::solver::Solution;

use crate::artifacts::{ProblemFile, SolutionFile};
use crate::CliError;

pub const ENV_VAR: &str = "ROACERT_EXTERNAL_SOLVER";

/// Name → command template registry.
#[derive(Debug, Default, Clone)]
pub struct ExternalSolvers {
    templates: BTreeMap<String, String>,
}

impl ExternalSolvers {
    pub fn new() -> Self {
        Self::default()
    }

    /// Picks up `ROACERT_EXTERNAL_SOLVER` as the `env` entry when set.
    pub fn from_env() -> Self {
        let mut reg = Self::new();
        if let Ok(tpl) = std::env::var(ENV_VAR) {
            if !tpl.is_empty() {
                reg.register("env", &tpl);
            }
        }
        reg
    }

    pub fn register(&mut self, name: &str, command_template: &str) {
        self.templates.insert(name.to_string(), command_template.to_string());
    }

    pub fn is_registered(&self, name: &str) -> bool {
        self.templates.contains_key(name)
    }

    /// Runs the named solver on the program via temp files in `work_dir`.
    pub fn solve(
        &self,
        name: &str,
        prog: &ConicProgram,
        work_dir: &Path,
    ) -> Result<Solution, CliError> {
        let tpl = self
            .templates
            .get(name)
            .ok_or_else(|| CliError::NotRegistered(name.to_string()))?;
        let problem_path = work_dir.join("problem.json");
        let solution_path = work_dir.join("solution.json");
        crate::artifacts::write_json(&problem_path, &ProblemFile::from_program(prog))?;
        let cmd = tpl
            .replace("{problem}", &problem_path.display().to_string())
            .replace("{solution}", &solution_path.display().to_string());
        let out = Command::new("sh")
            .arg("-c")
            .arg(&cmd)
            .output()
            .map_err(|e| CliError::ExternalSolverFailure(e.to_string()))?;
        if !out.status.success() {
            return Err(CliError::ExternalSolverFailure(format!(
                "'{cmd}' exited with {}: {}",
                out.status,
                String::from_utf8_lossy(&out.stderr)
            )));
        }
        let sol: SolutionFile = crate::artifacts::read_json(&solution_path)
            .map_err(|e| CliError::ExternalSolverFailure(format!("malformed output: {e}")))?;
        let mut sol = sol.into_solution();
        // recompute the objective from the returned point
        sol.objective = prog.c.iter().zip(&sol.z).map(|(c, z)| c * z).sum();
        Ok(sol)
    }
}
