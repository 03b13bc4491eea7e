//! The operads of monoid actions and the associative operads.
//!
//! Closed operations are labelled `*n`, open ones `*n;o` where `n` is the
//! total arity (the last input of an open operation is the open one).

use super::operad::FiniteOperad;
use crate::seqcore::{profile_closed, profile_open, Colour, Elem, FiniteSSequence};

pub fn closed_label(n: usize) -> String {
    format!("*{n}")
}

pub fn open_label(n: usize) -> String {
    format!("*{n};o")
}

/// `*n` at `(c^n; c)`.
pub fn star_closed(n: usize) -> Elem {
    Elem::new(profile_closed(n), closed_label(n))
}

/// `*n;o` at `(c^{n-1}, o; o)`. Requires `n > 0`.
pub fn star_open(n: usize) -> Elem {
    Elem::new(profile_open(n - 1), open_label(n))
}

/// Two-coloured operad of (unital when `unital`) monoid actions.
pub fn builtin_act(unital: bool, max_arity: usize) -> FiniteOperad {
    assert!(max_arity >= 2, "maxArity must be at least 2");
    let lo = if unital { 0 } else { 1 };
    let mut seq = FiniteSSequence::two_coloured(max_arity);
    for n in lo..=max_arity {
        seq.insert(profile_closed(n), closed_label(n))
            .expect("fresh");
    }
    for n in 1..=max_arity {
        seq.insert(profile_open(n - 1), open_label(n))
            .expect("fresh");
    }
    let mut op = FiniteOperad::new(seq);
    op.set_unit(Colour::Closed, &closed_label(1)).expect("unit");
    op.set_unit(Colour::Open, &open_label(1)).expect("unit");
    for n in 1..=max_arity {
        for m in lo..=max_arity {
            if n + m - 1 > max_arity {
                continue;
            }
            let k = n + m - 1;
            for i in 1..=n {
                op.set_compose(&star_closed(n), i, &star_closed(m), &closed_label(k))
                    .expect("closed composite");
                if i < n {
                    op.set_compose(&star_open(n), i, &star_closed(m), &open_label(k))
                        .expect("open-closed composite");
                }
            }
            if m >= 1 {
                op.set_compose(&star_open(n), n, &star_open(m), &open_label(k))
                    .expect("open-open composite");
            }
        }
    }
    op
}

/// One-coloured associative operad; `strict` drops arity zero.
pub fn builtin_as(strict: bool, max_arity: usize) -> FiniteOperad {
    assert!(max_arity >= 2, "maxArity must be at least 2");
    let lo = if strict { 1 } else { 0 };
    let mut seq = FiniteSSequence::new(&[Colour::Closed], max_arity);
    for n in lo..=max_arity {
        seq.insert(profile_closed(n), closed_label(n))
            .expect("fresh");
    }
    let mut op = FiniteOperad::new(seq);
    op.set_unit(Colour::Closed, &closed_label(1)).expect("unit");
    for n in 1..=max_arity {
        for m in lo..=max_arity {
            if n + m - 1 > max_arity {
                continue;
            }
            for i in 1..=n {
                op.set_compose(
                    &star_closed(n),
                    i,
                    &star_closed(m),
                    &closed_label(n + m - 1),
                )
                .expect("composite");
            }
        }
    }
    op
}
