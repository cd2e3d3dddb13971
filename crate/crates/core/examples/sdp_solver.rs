//! The interior-point SDP solver on a small complex problem, plus the text
//! format used to save problems.
//!
//! maximize y0 + y1  subject to  [[1 - y0, j y1 / 2], [-j y1 / 2, 1]] ⪰ 0,
//! y1 ≤ 1. The optimum sits at y1 = 1 and y0 = 3/4.

use num_complex::Complex64;
use risbeam::sdp::{dump_problem, load_problem, solve, LmiBlock, Relation, ScalarConstraint, SdpOptions, SdpProblem, Sense, SparseHermitian};

fn main() -> risbeam::Result<()> {
    let mut problem = SdpProblem::new(vec!["y0".into(), "y1".into()], Sense::Maximize);
    problem.objective = vec![1.0, 1.0];
    problem.scalar_constraints.push(ScalarConstraint::new(vec![(1, 1.0)], Relation::Le, 1.0));

    let mut block = LmiBlock::new(2);
    block.constant.add(0, 0, Complex64::new(1.0, 0.0));
    block.constant.add(1, 1, Complex64::new(1.0, 0.0));
    let mut corner = SparseHermitian::zeros(2);
    corner.add(0, 0, Complex64::new(-1.0, 0.0));
    block.add_term(0, corner);
    let mut off = SparseHermitian::zeros(2);
    off.add(0, 1, Complex64::new(0.0, 0.5));
    block.add_term(1, off);
    problem.lmi_blocks.push(block);

    let sol = solve(&problem, &SdpOptions::default())?;
    println!("status {:?} after {} iterations", sol.status, sol.iterations);
    println!("y = {:.9?}, objective {:.9}", sol.values, sol.objective);
    println!("residuals: primal {:.1e}, dual {:.1e}, gap {:.1e}", sol.primal_residual, sol.dual_residual, sol.gap);

    let text = dump_problem(&problem);
    print!("\n{text}");
    let again = solve(&load_problem(&text)?, &SdpOptions::default())?;
    println!("reloaded objective {:.9}", again.objective);
    Ok(())
}
