//! Exact decimal money: picodollar fixed point.
//!
//! Per-1M-token prices with at most six decimal places map to an integer
//! number of picodollars per token, so every cost here is an exact integer
//! product. Float arithmetic is never used.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

pub const PICO_PER_DOLLAR: i128 = 1_000_000_000_000;

/// An exact dollar amount in picodollars.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Money(pub i128);

impl Money {
    pub const ZERO: Money = Money(0);

    pub fn from_picodollars(pico: i128) -> Self {
        Money(pico)
    }

    pub fn picodollars(self) -> i128 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / PICO_PER_DOLLAR as f64
    }

    /// Mean over `n` items, rounded half-up to the nearest picodollar.
    pub fn div_round(self, n: i128) -> Money {
        if n == 0 {
            return Money::ZERO;
        }
        Money((self.0 + n / 2) / n)
    }
}

impl Add for Money {
    type Output = Money;
    fn add(self, rhs: Money) -> Money {
        Money(self.0 + rhs.0)
    }
}

impl AddAssign for Money {
    fn add_assign(&mut self, rhs: Money) {
        self.0 += rhs.0;
    }
}

impl Sum for Money {
    fn sum<I: Iterator<Item = Money>>(iter: I) -> Money {
        iter.fold(Money::ZERO, Add::add)
    }
}

impl fmt::Display for Money {
    /// Exact decimal rendering with at least six fractional digits,
    /// extended (never rounded) when sub-microdollar amounts are present.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let negative = self.0 < 0;
        let abs = self.0.unsigned_abs();
        let dollars = abs / PICO_PER_DOLLAR as u128;
        let frac_pico = abs % PICO_PER_DOLLAR as u128;
        let mut frac = format!("{frac_pico:012}");
        while frac.len() > 6 && frac.ends_with('0') {
            frac.pop();
        }
        write!(f, "{}{}.{}", if negative { "-" } else { "" }, dollars, frac)
    }
}

/// Parse a non-negative decimal dollar string with at most `max_dp`
/// fractional digits into an integer scaled by 10^`max_dp`.
pub fn parse_scaled_decimal(text: &str, max_dp: u32) -> Result<i128, String> {
    let text = text.trim();
    if text.is_empty() {
        return Err("empty decimal".into());
    }
    if text.starts_with('-') {
        return Err(format!("negative value not allowed: {text}"));
    }
    let (whole, frac) = match text.split_once('.') {
        Some((w, f)) => (w, f),
        None => (text, ""),
    };
    if frac.len() as u32 > max_dp {
        return Err(format!("more than {max_dp} decimal places: {text}"));
    }
    if !whole.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(format!("malformed decimal: {text}"));
    }
    let whole: i128 = if whole.is_empty() { 0 } else { whole.parse().map_err(|e| format!("{e}"))? };
    let mut scaled = whole;
    for i in 0..max_dp {
        scaled = scaled.checked_mul(10).ok_or("decimal overflow")?;
        let digit = frac.as_bytes().get(i as usize).map(|b| (b - b'0') as i128).unwrap_or(0);
        scaled += digit;
    }
    Ok(scaled)
}
