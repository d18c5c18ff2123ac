//! Continued-fraction expansion, convergents and the centered modulo.
//!
//! `cargo run --example continued_fractions -- 8/27`

use kohmoto::ratcf::{
    cf_expand, convergents, inverse_from_ladder, mod_inverse, mod_star, Rational,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let x: Rational = std::env::args()
        .nth(1)
        .as_deref()
        .unwrap_or("8/27")
        .parse()?;
    let cf = cf_expand(x)?;
    println!("{x} = [{cf}]");

    let ladder = convergents(&cf, cf.len() - 1)?;
    println!("{:>3} {:>8} {:>8} {:>10}", "k", "p_k", "q_k", "p_k^-1");
    for c in &ladder {
        let inv = inverse_from_ladder(&ladder, c.k)?;
        assert_eq!(inv, mod_inverse(c.p, c.q)?);
        println!("{:>3} {:>8} {:>8} {:>10}", c.k, c.p, c.q, inv);
    }

    let q = x.den();
    let residues: Vec<_> = (0..q).map(|i| mod_star(i, q)).collect::<Result<_, _>>()?;
    println!("centered residues mod {q}: {residues:?}");
    Ok(())
}
