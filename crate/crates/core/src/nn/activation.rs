use serde::{Deserialize, Serialize};

use crate::Scalar;

/// Elementwise activation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActivationKind {
    Identity,
    Sigmoid,
    #[serde(rename = "relu")]
    ReLU,
    Tanh,
}

impl ActivationKind {
    #[inline]
    pub fn apply<T: Scalar>(self, z: T) -> T {
        match self {
            ActivationKind::Identity => z,
            ActivationKind::Sigmoid => sigmoid(z),
            ActivationKind::ReLU => z.max(T::zero()),
            ActivationKind::Tanh => z.tanh(),
        }
    }

    /// Derivative with respect to the pre-activation `z`. ReLU uses 0 at the kink.
    #[inline]
    pub fn derivative<T: Scalar>(self, z: T) -> T {
        match self {
            ActivationKind::Identity => T::one(),
            ActivationKind::Sigmoid => {
                let s = sigmoid(z);
                s * (T::one() - s)
            }
            ActivationKind::ReLU => {
                if z > T::zero() {
                    T::one()
                } else {
                    T::zero()
                }
            }
            ActivationKind::Tanh => {
                let t = z.tanh();
                T::one() - t * t
            }
        }
    }

    pub fn is_smooth(self) -> bool {
        !matches!(self, ActivationKind::ReLU)
    }
}

#[inline]
fn sigmoid<T: Scalar>(z: T) -> T {
    // split on sign so exp never overflows
    if z >= T::zero() {
        T::one() / (T::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (T::one() + e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn relu_kink_derivative_is_zero() {
        assert_eq!(ActivationKind::ReLU.derivative(0.0f64), 0.0);
        assert_eq!(ActivationKind::ReLU.derivative(1e-300f64), 1.0);
    }

    #[test]
    fn sigmoid_at_zero() {
        assert_eq!(ActivationKind::Sigmoid.apply(0.0f64), 0.5);
        assert_eq!(ActivationKind::Sigmoid.derivative(0.0f64), 0.25);
    }

    proptest! {
        #[test]
        fn ranges_hold(z in -30.0f64..30.0) {
            let s = ActivationKind::Sigmoid.apply(z);
            prop_assert!(s > 0.0 && s < 1.0);
            // tanh rounds to ±1 in f64 beyond |z| ≈ 19
            let t = ActivationKind::Tanh.apply(z / 2.0);
            prop_assert!(t > -1.0 && t < 1.0);
            prop_assert!(ActivationKind::ReLU.apply(z) >= 0.0);
        }

        #[test]
        fn derivatives_are_finite(z in -1e6f64..1e6) {
            for kind in [ActivationKind::Identity, ActivationKind::Sigmoid, ActivationKind::ReLU, ActivationKind::Tanh] {
                prop_assert!(kind.derivative(z).is_finite());
                prop_assert!(kind.apply(z).is_finite());
            }
        }
    }
}
