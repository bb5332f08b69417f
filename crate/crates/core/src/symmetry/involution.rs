//! The discrete symmetry `x ↔ p`, `t → 1/t`.

use crate::error::Result;
use crate::operator::DiffOperator;
use crate::scalar::{ScalarExpr, Substitution};

/// Rewrite `P` in the variables `(p, x, 1/t)`: coefficients are substituted, `∂_x` and `∂_p`
/// swap and `∂_t` becomes `−t² ∂_t`.
pub fn exchange_involution(op: &DiffOperator) -> Result<DiffOperator> {
    let sub = Substitution::exchange();
    let dt = DiffOperator::monomial(-ScalarExpr::t().pow(2), (1, 0, 0));
    let mut out = DiffOperator::zero();
    for (&(i, j, k), c) in op.terms() {
        let coeff = sub.apply(c)?;
        let mut d = DiffOperator::identity();
        for _ in 0..i {
            d = d.compose(&dt);
        }
        let swapped = DiffOperator::monomial(ScalarExpr::one(), (0, k, j));
        out = out.add(&d.compose(&swapped).mul_scalar(&coeff));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::generators::make_generator_a;
    use super::*;
    use crate::psde_operator;

    fn a(i: usize) -> DiffOperator {
        make_generator_a(i).unwrap()
    }

    #[test]
    fn images() {
        let l = psde_operator();
        let t2 = ScalarExpr::t().pow(2);
        assert_eq!(exchange_involution(&l).unwrap(), l.mul_scalar(&-t2));
        assert_eq!(exchange_involution(&a(3)).unwrap(), a(1).neg());
        assert_eq!(exchange_involution(&a(1)).unwrap(), a(3).neg());
        assert_eq!(exchange_involution(&a(2)).unwrap(), a(2).neg());
        assert_eq!(exchange_involution(&a(4)).unwrap(), a(4));
        assert_eq!(exchange_involution(&a(5)).unwrap(), a(6));
        assert_eq!(exchange_involution(&a(7)).unwrap(), a(8));
        assert_eq!(exchange_involution(&a(9)).unwrap(), a(9));
    }

    #[test]
    fn involutive() {
        let ops: Vec<DiffOperator> = (1..=9).map(a).chain([psde_operator()]).collect();
        for op in ops {
            let twice = exchange_involution(&exchange_involution(&op).unwrap()).unwrap();
            assert_eq!(twice, op);
        }
    }
}
