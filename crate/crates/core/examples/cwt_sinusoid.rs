//! Morlet transform of a period-16 cosine: ridge period, phase and COI.

use wavecoh::cwt::{cwt, WaveletParams};
use wavecoh::synth::sinusoid;
use wavecoh::YearMonth;

fn main() -> wavecoh::Result<()> {
    let n = 304;
    let s = sinusoid(
        "cos16",
        YearMonth::new(1997, 1).expect("valid"),
        n,
        16.0,
        1.0,
    )?;
    let params = WaveletParams::for_length(n, 1.0);
    let field = cwt(&s, &params)?;
    println!(
        "{} scales, periods {:.2}..{:.1} months, COI at midpoint {:.1}",
        field.num_scales(),
        field.periods()[0],
        field.periods()[field.num_scales() - 1],
        field.coi()[n / 2]
    );
    let power = field.power();
    let phase = field.phase();
    for col in (0..n).step_by(38) {
        let best = (0..field.num_scales())
            .max_by(|&a, &b| power.get(a, col).total_cmp(power.get(b, col)))
            .unwrap_or(0);
        println!(
            "{}  ridge period {:5.2}  power {:6.2}  phase {:+.2}  reliable {}",
            s.time_at(col),
            field.periods()[best],
            power.get(best, col),
            phase.get(best, col),
            field.is_reliable(best, col)
        );
    }
    Ok(())
}
