// Fourier–Motzkin feasibility over nonnegative rationals. Kept deliberately
// naive: it shares nothing with the simplex code it is used to check.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use ratlp::{LinearSystem, Relation};

type Row = (Vec<BigRational>, BigRational);

fn normalize(row: Row) -> Option<Row> {
    let (a, b) = row;
    match a.iter().find(|c| !c.is_zero()) {
        None => {
            if b.is_positive() {
                Some((a, b))
            } else {
                None
            }
        }
        Some(lead) => {
            let s = lead.abs();
            Some((a.iter().map(|c| c / &s).collect(), b / s))
        }
    }
}

pub fn fm_feasible(sys: &LinearSystem) -> bool {
    let n = sys.vars.len();
    let mut rows: BTreeSet<Row> = BTreeSet::new();
    let push = |rows: &mut BTreeSet<Row>, a: Vec<BigRational>, b: BigRational| {
        if let Some(r) = normalize((a, b)) {
            rows.insert(r);
        }
    };
    for c in &sys.constraints {
        let mut a = vec![BigRational::zero(); n];
        for (v, x) in &c.coeffs {
            a[*v] += x;
        }
        let neg: Vec<BigRational> = a.iter().map(|x| -x.clone()).collect();
        match c.rel {
            Relation::Ge => push(&mut rows, a, c.rhs.clone()),
            Relation::Le => push(&mut rows, neg, -c.rhs.clone()),
            Relation::Eq => {
                push(&mut rows, a, c.rhs.clone());
                push(&mut rows, neg, -c.rhs.clone());
            }
        }
    }
    for j in 0..n {
        let mut a = vec![BigRational::zero(); n];
        a[j] = BigRational::from_integer(1.into());
        push(&mut rows, a, BigRational::zero());
    }
    let mut left: Vec<usize> = (0..n).collect();
    while !left.is_empty() {
        // cheapest variable first: fewest new rows
        let cost = |j: usize| {
            let p = rows.iter().filter(|r| r.0[j].is_positive()).count();
            let q = rows.iter().filter(|r| r.0[j].is_negative()).count();
            p * q
        };
        let at = (0..left.len()).min_by_key(|&i| cost(left[i])).unwrap();
        let j = left.swap_remove(at);
        let (mut pos, mut neg, mut keep) = (vec![], vec![], BTreeSet::new());
        for r in rows {
            if r.0[j].is_positive() {
                pos.push(r);
            } else if r.0[j].is_negative() {
                neg.push(r);
            } else {
                keep.insert(r);
            }
        }
        for p in &pos {
            for q in &neg {
                let sp = p.0[j].clone();
                let sq = -q.0[j].clone();
                let a: Vec<BigRational> =
                    (0..n).map(|i| &p.0[i] / &sp + &q.0[i] / &sq).collect();
                let b = &p.1 / &sp + &q.1 / &sq;
                push(&mut keep, a, b);
            }
        }
        rows = strongest(keep);
        if rows.iter().any(|(a, b)| a.iter().all(|c| c.is_zero()) && b.is_positive()) {
            return false;
        }
    }
    rows.iter().all(|(_, b)| !b.is_positive())
}

/// Of the rows sharing a left-hand side only the one with the largest
/// bound matters.
fn strongest(rows: BTreeSet<Row>) -> BTreeSet<Row> {
    let mut best: BTreeMap<Vec<BigRational>, BigRational> = BTreeMap::new();
    for (a, b) in rows {
        match best.get(&a) {
            Some(old) if *old >= b => {}
            _ => {
                best.insert(a, b);
            }
        }
    }
    best.into_iter().collect()
}
