use super::{check::extension, KripkeModel};
use crate::error::ModelError;
use crate::syntax::Formula;

/// Default cap on `props * states`, the number of valuation bits enumerated.
pub const DEFAULT_FRAME_BUDGET_BITS: usize = 20;

/// Frame validity: `f` holds at every state under every valuation of its
/// propositions. Enumerates `2^(props * states)` valuations; fails when
/// that exponent exceeds `budget_bits`.
pub fn frame_valid(frame: &KripkeModel, f: &Formula, budget_bits: usize) -> Result<bool, ModelError> {
    let props: Vec<_> = f.props().into_iter().collect();
    let n = frame.num_states();
    let bits = props.len() * n;
    if bits > budget_bits {
        return Err(ModelError::BudgetExceeded {
            what: "frame valuations",
            needed: 1u128 << bits.min(127),
            cap: 1u128 << budget_bits.min(127),
        });
    }
    let mut m = frame.frame();
    for code in 0u64..(1u64 << bits) {
        for (i, p) in props.iter().enumerate() {
            let mut ext = m.empty_set();
            ext.extend((0..n).filter(|w| code >> (i * n + w) & 1 == 1));
            m.set_valuation(p.clone(), ext);
        }
        if extension(&m, f)?.count_ones(..) != n {
            return Ok(false);
        }
    }
    Ok(true)
}
