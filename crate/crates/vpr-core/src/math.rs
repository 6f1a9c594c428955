//! Float math that works in both std and no_std builds.
//!
//! Std implementations are preferred when available; the `libm` feature
//! provides the same functions for no_std targets.

#[cfg(feature = "std")]
mod imp {
    #[inline]
    pub fn sqrt(x: f64) -> f64 {
        x.sqrt()
    }

    #[inline]
    pub fn atan2(y: f64, x: f64) -> f64 {
        y.atan2(x)
    }

    #[inline]
    pub fn log2(x: f64) -> f64 {
        x.log2()
    }

    #[inline]
    pub fn floor(x: f64) -> f64 {
        x.floor()
    }

    #[inline]
    pub fn round(x: f64) -> f64 {
        x.round()
    }

    #[inline]
    pub fn abs(x: f64) -> f64 {
        x.abs()
    }
}

#[cfg(all(not(feature = "std"), feature = "libm"))]
mod imp {
    #[inline]
    pub fn sqrt(x: f64) -> f64 {
        libm::sqrt(x)
    }

    #[inline]
    pub fn atan2(y: f64, x: f64) -> f64 {
        libm::atan2(y, x)
    }

    #[inline]
    pub fn log2(x: f64) -> f64 {
        libm::log2(x)
    }

    #[inline]
    pub fn floor(x: f64) -> f64 {
        libm::floor(x)
    }

    #[inline]
    pub fn round(x: f64) -> f64 {
        libm::round(x)
    }

    #[inline]
    pub fn abs(x: f64) -> f64 {
        libm::fabs(x)
    }
}

pub(crate) use imp::{abs, atan2, floor, log2, round, sqrt};
