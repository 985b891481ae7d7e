//! The linear change of variables `(x1, y1, x2, y2) -> (a1, a2, b1, b2)`.

use super::DiophantineError;

/// `a1 = y1 - y2, a2 = y1 + y2, b1 = x1 - x2, b2 = x1 + x2`.
pub fn quadruple_transform(x1: i64, y1: i64, x2: i64, y2: i64) -> (i64, i64, i64, i64) {
    (y1 - y2, y1 + y2, x1 - x2, x1 + x2)
}

/// Inverse of [`quadruple_transform`], returning `(x1, y1, x2, y2)`.
pub fn quadruple_inverse(
    a1: i64,
    a2: i64,
    b1: i64,
    b2: i64,
) -> Result<(i64, i64, i64, i64), DiophantineError> {
    if (a1 - a2).rem_euclid(2) != 0 || (b1 - b2).rem_euclid(2) != 0 {
        return Err(DiophantineError::InverseParityViolation);
    }
    Ok(((b1 + b2) / 2, (a1 + a2) / 2, (b2 - b1) / 2, (a2 - a1) / 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(quadruple_transform(3, 2, 1, 1), (1, 3, 2, 4));
        assert_eq!(quadruple_inverse(1, 3, 2, 4).unwrap(), (3, 2, 1, 1));
        assert_eq!(
            quadruple_inverse(1, 2, 0, 0),
            Err(DiophantineError::InverseParityViolation)
        );
        assert_eq!(
            quadruple_inverse(-1, 1, -3, 2),
            Err(DiophantineError::InverseParityViolation)
        );
    }

    proptest! {
        #[test]
        fn roundtrip(x1 in -1_000_000i64..1_000_000, y1 in -1_000_000i64..1_000_000,
                     x2 in -1_000_000i64..1_000_000, y2 in -1_000_000i64..1_000_000) {
            let (a1, a2, b1, b2) = quadruple_transform(x1, y1, x2, y2);
            prop_assert_eq!(quadruple_inverse(a1, a2, b1, b2).unwrap(), (x1, y1, x2, y2));
        }
    }
}
