//! Markov blankets in the three graph classes, checked against the
//! brute-force separation search.

use mispr::mgraph::parse_mgraph;
use mispr::mgraph::separation::{minimal_blanket, DEFAULT_VERTEX_LIMIT};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let graphs = [
        "class: mdag\nvar X1\nvar X2\nindicator R1 for X1\nindicator R2 for X2\nX1 -> X2\nX1 -> R2\nX2 -> R1\n",
        "class: madmg\nvar X1\nvar X2\nindicator R1 for X1\nindicator R2 for X2\nX1 -> R2\nX2 -> R1\nX1 <-> X2\n",
        "class: mcg\nvar X1\nvar X2\nindicator R1 for X1\nindicator R2 for X2\nobserved O\n\
         O -> X1\nX1 -> X2\nO -> X2\nO -> R1\nO -> R2\nR1 -- R2\n",
    ];
    for text in graphs {
        let g = parse_mgraph(text)?;
        println!("{:?}, S1 {}", g.class(), if g.check_s1() { "holds" } else { "fails" });
        for v in (0..g.len()).map(mispr::mgraph::VertexId) {
            let mb = g.markov_blanket(v)?;
            let names: Vec<&str> = mb.iter().map(|&w| g.name(w)).collect();
            let agrees = match minimal_blanket(&g, v, DEFAULT_VERTEX_LIMIT) {
                Ok(oracle) => if oracle == mb { "=" } else { "!=" },
                Err(_) => "?",
            };
            println!("  mb({}) = {{{}}} {agrees} oracle", g.name(v), names.join(", "));
        }
        for i in 0..g.k() {
            for j in 0..g.k() {
                if g.implied_independence(i, j)? {
                    println!("  X{} independent of R{} given the rest", i + 1, j + 1);
                }
            }
        }
    }
    Ok(())
}
