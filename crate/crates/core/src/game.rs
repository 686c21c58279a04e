use serde::Serialize;

use crate::error::{Error, Result};

/// Symmetric 2x2 game: the focal player's payoff for (C,C)=R, (C,D)=S,
/// (D,C)=T, (D,D)=P.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct GameMatrix {
    pub R: f64,
    pub S: f64,
    pub T: f64,
    pub P: f64,
}

impl GameMatrix {
    #[allow(non_snake_case)]
    pub fn new(R: f64, S: f64, T: f64, P: f64) -> Result<Self> {
        if [R, S, T, P].iter().all(|v| v.is_finite()) {
            Ok(Self { R, S, T, P })
        } else {
            Err(Error::param("game payoffs must be finite"))
        }
    }

    /// Donation game: a cooperator pays `c` to give `b` to its partner.
    pub fn donation(b: f64, c: f64) -> Result<Self> {
        Self::new(b - c, -c, b, 0.0)
    }

    /// Payoff of a focal player with strategy `focal` against `other`
    /// (`true` = cooperate).
    pub fn payoff(&self, focal: bool, other: bool) -> f64 {
        match (focal, other) {
            (true, true) => self.R,
            (true, false) => self.S,
            (false, true) => self.T,
            (false, false) => self.P,
        }
    }
}

/// Structure-coefficient criterion: C is favored over D iff `(R-P) sigma > T-S`.
pub fn selection_condition(game: &GameMatrix, sigma: f64) -> bool {
    (game.R - game.P) * sigma > game.T - game.S
}
