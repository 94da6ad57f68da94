//! JSON circuit descriptions.
//!
//! ```json
//! { "modes": 4,
//!   "gates": [ { "gate": "H", "wires": [0] },
//!              { "gate": "PHASE", "params": [1.5708], "wires": [0] },
//!              { "gate": "CNOT", "wires": [0, 1] } ] }
//! ```
//!
//! `modes` must be a power of two; wires index its two-level tensor factors,
//! factor 0 being the most significant (the spatial factor in the
//! `[RH, RV, DH, DV]` layout). Gates are applied in list order.

use serde::{Deserialize, Serialize};

use crate::error::{BornError, Result};
use crate::optics::{embed_cnot, embed_single, gate_hadamard, gate_phase, gate_x, UnitaryMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateSpec {
    pub gate: String,
    #[serde(default)]
    pub params: Vec<f64>,
    #[serde(default)]
    pub wires: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitSpec {
    pub modes: usize,
    #[serde(default)]
    pub gates: Vec<GateSpec>,
}

impl CircuitSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: CircuitSpec = serde_json::from_str(text)?;
        spec.n_wires()?;
        Ok(spec)
    }

    fn n_wires(&self) -> Result<usize> {
        if self.modes == 0 || !self.modes.is_power_of_two() {
            return Err(BornError::Circuit(format!(
                "modes must be a power of two, got {}",
                self.modes
            )));
        }
        Ok(self.modes.trailing_zeros() as usize)
    }

    /// The circuit's overall unitary.
    pub fn unitary(&self) -> Result<UnitaryMatrix> {
        let n = self.n_wires()?;
        let mut total = UnitaryMatrix::identity(self.modes)?;
        for (idx, g) in self.gates.iter().enumerate() {
            let u =
                gate_unitary(g, n).map_err(|e| BornError::Circuit(format!("gate {idx}: {e}")))?;
            total = u.compose(&total)?;
        }
        Ok(total)
    }
}

fn gate_unitary(g: &GateSpec, n_wires: usize) -> Result<UnitaryMatrix> {
    let name = g.gate.to_ascii_uppercase();
    let expect = |wires: usize, params: usize| -> Result<()> {
        if g.wires.len() != wires || g.params.len() != params {
            return Err(BornError::Circuit(format!(
                "{} takes {wires} wire(s) and {params} parameter(s)",
                g.gate
            )));
        }
        Ok(())
    };
    match name.as_str() {
        "I" | "ID" => {
            expect(1, 0)?;
            embed_single(&UnitaryMatrix::identity(2)?, g.wires[0], n_wires)
        }
        "H" | "HADAMARD" | "BS" => {
            expect(1, 0)?;
            embed_single(&gate_hadamard(), g.wires[0], n_wires)
        }
        "X" | "NOT" | "HWP" => {
            expect(1, 0)?;
            embed_single(&gate_x(), g.wires[0], n_wires)
        }
        "PHASE" | "R" => {
            expect(1, 1)?;
            embed_single(&gate_phase(g.params[0]), g.wires[0], n_wires)
        }
        "CNOT" | "CX" => {
            expect(2, 0)?;
            embed_cnot(g.wires[0], g.wires[1], n_wires)
        }
        _ => Err(BornError::Circuit(format!("unknown gate '{}'", g.gate))),
    }
}
