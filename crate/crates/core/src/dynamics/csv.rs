use std::io::{self, Write};

use super::{DiagnosticsRecord, ParticleState};
use crate::kernelalg::Model;

pub fn write_state_header<W: Write>(out: &mut W, dim: usize) -> io::Result<()> {
    let mut cols = vec!["t".to_string(), "particle_id".to_string()];
    cols.extend((1..=dim).map(|i| format!("a{i}")));
    cols.extend((1..=dim).map(|i| format!("x{i}")));
    for i in 1..=dim {
        cols.extend((1..=dim).map(|j| format!("g{i}{j}")));
    }
    cols.push("theta0".to_string());
    writeln!(out, "{}", cols.join(","))
}

/// One row per particle; call [`write_state_header`] first.
/// Floats use the shortest round-trip form.
pub fn write_state_csv<W: Write>(out: &mut W, state: &ParticleState, model: Model) -> io::Result<()> {
    let d = state.dim;
    let mut line = String::new();
    for i in 0..state.len() {
        line.clear();
        line.push_str(&format!("{:?},{}", state.t, i));
        for v in &state.labels[i][..d] {
            line.push_str(&format!(",{v:?}"));
        }
        for v in &state.positions[i][..d] {
            line.push_str(&format!(",{v:?}"));
        }
        for row in &state.gradients[i][..d] {
            for v in &row[..d] {
                line.push_str(&format!(",{v:?}"));
            }
        }
        line.push_str(&format!(",{:?}", state.scalar_datum(model, i)));
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn write_diagnostics_header<W: Write>(out: &mut W) -> io::Result<()> {
    writeln!(out, "t,chord_min,chord_max,lambda_bound,grad_u_sup,det_dev,hamiltonian,p1,p2,ang_imp")
}

/// Invariant columns are left empty when the record has none.
pub fn write_diagnostics_csv<W: Write>(out: &mut W, r: &DiagnosticsRecord) -> io::Result<()> {
    write!(out, "{:?},{:?},{:?},{:?},{:?},{:?}", r.t, r.chord_min, r.chord_max, r.lambda_bound, r.grad_u_sup, r.det_dev)?;
    match &r.invariants {
        Some(inv) => writeln!(
            out,
            ",{:?},{:?},{:?},{:?}",
            inv.hamiltonian, inv.momentum[0], inv.momentum[1], inv.angular_impulse
        ),
        None => writeln!(out, ",,,,"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn headers() {
        let mut b = Vec::new();
        write_state_header(&mut b, 2).unwrap();
        assert_eq!(String::from_utf8(b).unwrap(), "t,particle_id,a1,a2,x1,x2,g11,g12,g21,g22,theta0\n");
        let mut b = Vec::new();
        write_state_header(&mut b, 3).unwrap();
        assert!(String::from_utf8(b).unwrap().contains("x3,g11,g12,g13,g21"));
    }

    #[test]
    fn state_rows() {
        let s = ParticleState::point_vortices(&[[0.0, 0.0], [1.0, 0.5]], &[1.0, -2.0]).unwrap();
        let mut b = Vec::new();
        write_state_csv(&mut b, &s, Model::Euler2D).unwrap();
        let text = String::from_utf8(b).unwrap();
        assert_eq!(text.lines().nth(1).unwrap(), "0.0,1,1.0,0.5,1.0,0.5,1.0,0.0,0.0,1.0,-2.0");
    }
}
