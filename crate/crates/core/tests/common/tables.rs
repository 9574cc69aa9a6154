//! The K(A,n) homology grid and the L_{n+i}Γ⁴(A,n) grid, transcribed cell by cell as functor expressions
//! and evaluated on A = Z^r by hand-written dimension formulas.

use dpow_core::AbGroupType;

use super::binom;

/// Rows n = 1..=11, columns i = 0..=10. `None` is an empty box, which stands
/// for the lowest nonempty box above it in the same column.
const TABLE_B: [[Option<&str>; 11]; 11] = {
    const E: Option<&str> = None;
    [
        [Some("A"), Some("L2"), Some("L3"), Some("L4"), Some("L5"), Some("L6"), Some("L7"), Some("L8"), Some("L9"), Some("L10"), Some("L11")],
        [E, Some("0"), Some("G2"), Some("0"), Some("G3"), Some("0"), Some("G4"), Some("0"), Some("G5"), Some("0"), Some("G6")],
        [E, E, Some("A/2"), Some("L2"), Some("A/3"), Some("AxA/2"), Some("L3 + A/2"), Some("AxA/3 + L2(A/2)"), Some("Phi4 + A/5"), Some("L4 + AxA/2"), Some("L2xA/3 + AxL2(A/2)")],
        [E, E, E, Some("0"), Some("G2 + A/3"), Some("0"), Some("AxA/2 + A/2"), Some("0"), Some("G3 + A/5 + AxA/3 + G2(A/2)"), Some("G2F(A/2)"), Some("G2xA/2 + AxA/2")],
        [E, E, E, E, Some("A/2 + A/3"), Some("L2"), Some("A/2"), Some("AxA/2"), Some("A/3 + A/5 + A/2"), Some("L2(A/2) + A/2 + AxA/2 + AxA/3"), Some("L3 + G2F(A/2)")],
        [E, E, E, E, E, Some("0"), Some("G2 + A/2"), Some("0"), Some("AxA/2 + A/3 + A/5 + A/2"), Some("A/2"), Some("G2(A/2) + AxA/3")],
        [E, E, E, E, E, E, Some("A/2 + A/2"), Some("L2"), Some("A/3 + A/5 + A/2"), Some("A/2 + AxA/2"), Some("A/2")],
        [E, E, E, E, E, E, E, Some("0"), Some("G2 + A/3 + A/5 + A/2"), Some("A/2"), Some("A/2 + AxA/2")],
        [E, E, E, E, E, E, E, E, Some("A/2 + A/3 + A/5 + A/2"), Some("A/2 + L2"), Some("A/2")],
        [E, E, E, E, E, E, E, E, E, Some("A/2"), Some("G2 + A/2")],
        [E, E, E, E, E, E, E, E, E, E, Some("A/2 + A/2")],
    ]
};

/// L_{n+i}Γ^4(A, n): rows i = 0..=12, columns n = 1..=4.
const TABLE_C: [[&str; 4]; 13] = [
    ["A/2", "A/2", "A/2", "A/2"],
    ["L2(A/2) + AxA/3", "0", "0", "0"],
    ["Phi4", "G2(A/2) + AxA/3", "A/2", "A/2"],
    ["L4", "G2F(A/2)", "L2(A/2) + A/2 + AxA/3", "A/2"],
    ["0", "G2F(A/2)xA/2", "G2F(A/2)", "G2(A/2) + AxA/3"],
    ["0", "0", "A/2xA/2", "G2F(A/2)"],
    ["0", "G4", "G2F(A/2)xA/2 + A/2", "A/2xA/2 + A/2"],
    ["0", "0", "L2(A/2) + AxA/3", "A/2xA/2"],
    ["0", "0", "Phi4", "G2(A/2) + G2xA/2 + AxA/3"],
    ["0", "0", "L4", "G2F(A/2)"],
    ["0", "0", "0", "G2F(A/2)xA/2"],
    ["0", "0", "0", "0"],
    ["0", "0", "0", "G4"],
];

fn el(p: u64, k: u64) -> AbGroupType {
    AbGroupType::elementary(p, k as usize)
}

/// One summand evaluated at A = Z^r.
pub fn eval_term(term: &str, r: u64) -> AbGroupType {
    let term = term.trim();
    if let Some(p) = term.strip_prefix("A/").and_then(|s| s.parse().ok()) {
        return el(p, r);
    }
    if let Some(p) = term.strip_prefix("AxA/").and_then(|s| s.parse().ok()) {
        return el(p, r * r);
    }
    if let Some(k) = term.strip_prefix('L').and_then(|s| s.parse().ok()) {
        return AbGroupType::free(binom(r, k) as usize);
    }
    if let Some(k) = term.strip_prefix('G').and_then(|s| s.parse::<u64>().ok()) {
        return AbGroupType::free(binom(r + k - 1, k) as usize);
    }
    match term {
        "0" => AbGroupType::zero(),
        "A" => AbGroupType::free(r as usize),
        "L2(A/2)" => el(2, binom(r, 2)),
        "L2xA/3" => el(3, binom(r, 2) * r),
        "AxL2(A/2)" => el(2, r * binom(r, 2)),
        // Γ²(⊕ Z/2) = ⊕ Γ²(Z/2) ⊕ ⊕_{i<j} Z/2 ⊗ Z/2 with Γ²(Z/2) = Z/4
        "G2(A/2)" => el(4, r).direct_sum(&el(2, binom(r, 2))),
        "G2F(A/2)" => el(2, binom(r + 1, 2)),
        "G2F(A/2)xA/2" | "G2xA/2" => el(2, binom(r + 1, 2) * r),
        "A/2xA/2" => el(2, r * r),
        // dim Γ⁴ − dim Λ⁴ over F_2
        "Phi4" => el(2, binom(r + 3, 4) - binom(r, 4)),
        _ => panic!("unknown table term {term}"),
    }
}

pub fn eval_cell(cell: &str, r: u64) -> AbGroupType {
    cell.split('+').fold(AbGroupType::zero(), |acc, t| acc.direct_sum(&eval_term(t, r)))
}

/// H_{n+i}(K(Z^r, n)) as read off the table, 1 ≤ n ≤ 11, 0 ≤ i ≤ 10.
pub fn table_b(n: usize, i: usize, r: u64) -> AbGroupType {
    let cell = (0..n).rev().find_map(|row| TABLE_B[row][i]).expect("column has a top entry");
    eval_cell(cell, r)
}

/// Whether the box at (n, i) is printed in the table rather than inherited.
pub fn table_b_printed(n: usize, i: usize) -> bool {
    TABLE_B[n - 1][i].is_some()
}

/// L_{n+i}Γ^4(Z^r, n) as read off the table, 1 ≤ n ≤ 4, 0 ≤ i ≤ 12.
pub fn table_c(n: usize, i: usize, r: u64) -> AbGroupType {
    eval_cell(TABLE_C[i][n - 1], r)
}
