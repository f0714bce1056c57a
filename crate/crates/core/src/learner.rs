//! The online protocol shared by every learner in the crate.

use crate::error::Result;

/// One round is `predict(x_t)` followed by `observe(y_t)`. Learners own their
/// randomness, so a learner built from a seed replays exactly.
pub trait OnlineLearner<X, Y> {
    fn predict(&mut self, x: &X) -> Result<Y>;
    fn observe(&mut self, y: &Y) -> Result<()>;
}

impl<X, Y, L: OnlineLearner<X, Y> + ?Sized> OnlineLearner<X, Y> for Box<L> {
    fn predict(&mut self, x: &X) -> Result<Y> {
        (**self).predict(x)
    }
    fn observe(&mut self, y: &Y) -> Result<()> {
        (**self).observe(y)
    }
}
