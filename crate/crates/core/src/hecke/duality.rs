//! Operators obtained from V_{x,1} by the second duality: the colength-r
//! subsheaves of F correspond to duals of colength-(n-r) subsheaves of
//! F^v(x), with the same multiplicities.

use super::ctx::Ctx;
use super::{rank3, Neighbor, Targets};
use crate::bundle::BundleClass;
use crate::error::Result;
use crate::places::Place;
use crate::Curve;

type Phi = fn(&Curve, &BundleClass, &Place) -> Result<Vec<Neighbor>>;

/// V_{x,n-1}(F) = { B^v : B in V_{x,1}(F^v(x)) }.
pub fn complementary(curve: &Curve, f: &BundleClass, place: &Place, phi1: Phi) -> Result<Vec<Neighbor>> {
    let ctx = Ctx::new(curve, place)?;
    let g = f.dual(curve).twist(curve, 1, ctx.x);
    let mut t = Targets::new(curve);
    for n in phi1(curve, &g, place)? {
        t.push(n.target.dual(curve).summands().to_vec(), n.weight);
    }
    let r = f.rank() as i32 - 1;
    t.finish(f, r, curve.mul(ctx.x, r as i64))
}

pub fn phi2_rank3(curve: &Curve, f: &BundleClass, place: &Place) -> Result<Vec<Neighbor>> {
    complementary(curve, f, place, rank3::phi1)
}
