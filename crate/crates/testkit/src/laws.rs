//! The eleven sum/product identities that hold up to behaviour for closed
//! μ-expressions, as (name, left side, right side) builders.

use cfcoalg::{ClosedMuExpr, MuExpr, Semiring};

pub type Sides<K> = (MuExpr<K>, MuExpr<K>);
pub type Law<K> = (&'static str, fn(&MuExpr<K>, &MuExpr<K>, &MuExpr<K>) -> Sides<K>);

fn sum<K: Semiring>(l: &MuExpr<K>, r: &MuExpr<K>) -> MuExpr<K> {
    MuExpr::sum(l.clone(), r.clone())
}

fn prod<K: Semiring>(l: &MuExpr<K>, r: &MuExpr<K>) -> MuExpr<K> {
    MuExpr::prod(l.clone(), r.clone())
}

pub fn mu_laws<K: Semiring>() -> [Law<K>; 11] {
    [
        ("0 + t = t", |_, t, _| (sum(&MuExpr::zero(), t), t.clone())),
        ("t + 0 = t", |_, t, _| (sum(t, &MuExpr::zero()), t.clone())),
        ("s + t = t + s", |s, t, _| (sum(s, t), sum(t, s))),
        ("s + (t + u) = (s + t) + u", |s, t, u| {
            (sum(s, &sum(t, u)), sum(&sum(s, t), u))
        }),
        ("0 * t = 0", |_, t, _| (prod(&MuExpr::zero(), t), MuExpr::zero())),
        ("t * 0 = 0", |_, t, _| (prod(t, &MuExpr::zero()), MuExpr::zero())),
        ("1 * t = t", |_, t, _| (prod(&MuExpr::one(), t), t.clone())),
        ("t * 1 = t", |_, t, _| (prod(t, &MuExpr::one()), t.clone())),
        ("s * (t + u) = s * t + s * u", |s, t, u| {
            (prod(s, &sum(t, u)), sum(&prod(s, t), &prod(s, u)))
        }),
        ("s * (t * u) = (s * t) * u", |s, t, u| {
            (prod(s, &prod(t, u)), prod(&prod(s, t), u))
        }),
        ("(s + t) * u = s * u + t * u", |s, t, u| {
            (prod(&sum(s, t), u), sum(&prod(s, u), &prod(t, u)))
        }),
    ]
}

/// Both sides of `law` instantiated at closed arguments.
pub fn instantiate<K: Semiring>(
    law: &Law<K>,
    s: &ClosedMuExpr<K>,
    t: &ClosedMuExpr<K>,
    u: &ClosedMuExpr<K>,
) -> (ClosedMuExpr<K>, ClosedMuExpr<K>) {
    let (l, r) = (law.1)(s.expr(), t.expr(), u.expr());
    (
        ClosedMuExpr::new(l).expect("closed"),
        ClosedMuExpr::new(r).expect("closed"),
    )
}
