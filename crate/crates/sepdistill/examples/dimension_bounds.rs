//! Dimension thresholds for single-copy distillation.
//!
//! The headline classifications: no pure entanglement can be distilled
//! from a 2x2 or 2x3 system by separable operations; 3x3 suffices for
//! separable operations but not for one-round LOCC; 2x4 suffices even for
//! LOCC; and three qubits fall short of the tripartite separable bound.

use sepdistill::analysis::{bound_check, BoundKind};

fn main() -> sepdistill::Result<()> {
    let table: [(&str, BoundKind, &[usize], usize, bool); 8] = [
        ("2x2 under SEP", BoundKind::BipartiteSep, &[2, 2], 2, false),
        ("2x3 under SEP", BoundKind::BipartiteSep, &[2, 3], 2, false),
        ("3x3 under SEP", BoundKind::BipartiteSep, &[3, 3], 2, true),
        ("3x3 under LOCC", BoundKind::BipartiteLocc, &[3, 3], 2, false),
        ("2x4 under LOCC", BoundKind::BipartiteLocc, &[2, 4], 2, true),
        ("2x2x2 under SEP", BoundKind::TripartiteSep, &[2, 2, 2], 2, false),
        ("3x3x3 under SEP", BoundKind::TripartiteSep, &[3, 3, 3], 2, true),
        ("3x3x6 under LOCC", BoundKind::TripartiteLocc, &[3, 3, 6], 3, true),
    ];

    println!("{:18} {:16} {:>9} {:>12} {:>10}", "system", "bound", "aggregate", "per-party>=d", "satisfied");
    for (label, kind, dims, d, expected) in table {
        let check = bound_check(kind, d, dims)?;
        println!(
            "{:18} {:16} {:>9} {:>12} {:>10}",
            label,
            kind.code(),
            check.aggregate_ok,
            check.per_party_ok,
            check.satisfied
        );
        assert_eq!(check.satisfied, expected, "{label}");
    }

    // The general n-party separable threshold: sum of dims >= (n+1) d.
    let wide = bound_check(BoundKind::NPartiteSep, 2, &[2, 2, 3, 3])?;
    let narrow = bound_check(BoundKind::NPartiteSep, 2, &[2, 2, 2, 3])?;
    println!("\n4-party sums: {:?} -> {}, {:?} -> {}", wide.dims, wide.satisfied, narrow.dims, narrow.satisfied);
    assert!(wide.satisfied && !narrow.satisfied);
    Ok(())
}
