//! Pasting added tokens down onto an execution of an ordinary IO net.
//!
//! Given `M -σ-> M'` and a larger `M̄ ≥ M` with the same carrier, each step
//! `t` of `σ` is replaced by `t^d`, where `d` is one plus the surplus of the
//! current larger marking over the original on the source place of `t`. The
//! whole surplus on the source thus travels along with the original token,
//! so the larger execution keeps dominating the original one with an equal
//! carrier at every step.

use thiserror::Error;

use crate::classify::{classify, presentation, ClassifyError};
use crate::net::{Marking, Net, NetError, TransId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PasteError {
    #[error("the net is not an ordinary IO net")]
    NotOrdIo,
    #[error("the larger marking must dominate the original one with the same carrier")]
    NotDominating,
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Net(#[from] NetError),
}

/// The duplicated execution and its final marking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PastedExecution {
    pub sequence: Vec<TransId>,
    pub end: Marking,
}

/// Lifts the execution `seq` from `m` to the larger marking `m_bar`.
pub fn paste_down(net: &Net, m: &Marking, seq: &[TransId], m_bar: &Marking) -> Result<PastedExecution, PasteError> {
    let class = classify(net);
    if !(class.io && class.ordinary) {
        return Err(PasteError::NotOrdIo);
    }
    net.check_marking(m)?;
    net.check_marking(m_bar)?;
    if !m.le(m_bar) || m.carrier() != m_bar.carrier() {
        return Err(PasteError::NotDominating);
    }
    let mut cur = m.clone();
    let mut big = m_bar.clone();
    let mut sequence = Vec::new();
    for &t in seq {
        let source = presentation(net, t)?.source;
        let d = 1 + (big[source] - cur[source]);
        cur = net.fire(&cur, t)?;
        for _ in 0..d {
            big = net.fire(&big, t)?;
            sequence.push(t);
        }
    }
    Ok(PastedExecution { sequence, end: big })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::parse_net;

    #[test]
    fn surplus_follows_the_moving_token() {
        let (net, _) = parse_net("net c\nplace a\nplace b\nplace o\ntrans t pre a o post b o\n").unwrap();
        let m = Marking::new(vec![1, 0, 1]);
        let m_bar = Marking::new(vec![3, 0, 1]);
        let out = paste_down(&net, &m, &[0], &m_bar).unwrap();
        assert_eq!(out.sequence, vec![0, 0, 0]);
        assert_eq!(out.end, Marking::new(vec![0, 3, 1]));
    }

    #[test]
    fn rejects_a_different_carrier() {
        let (net, _) = parse_net("net c\nplace a\nplace b\ntrans t pre a post b\n").unwrap();
        let err = paste_down(&net, &Marking::new(vec![1, 0]), &[], &Marking::new(vec![1, 1]));
        assert_eq!(err, Err(PasteError::NotDominating));
    }
}
