//! Parse an expression, differentiate it and evaluate it on a compiled tape.

use algebroid_lab::expr::Tape;
use algebroid_lab::parse;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let coords = ["r", "th"];
    let f = parse("r^2 * sin(th) + exp(-r / 2) * 1.5e-1", &coords)?;
    let names: Vec<String> = coords.iter().map(|s| s.to_string()).collect();
    println!("f        = {}", f.display(&names));
    let dr = f.diff(0);
    let dth = f.diff(1);
    println!("df/dr    = {}", dr.display(&names));
    println!("df/dth   = {}", dth.display(&names));

    let tape = Tape::new(&[f.clone(), dr, dth]);
    let p = [1.3, 0.4];
    let v = tape.eval(&p)?;
    println!("at {p:?}: f = {:.6}, grad = ({:.6}, {:.6})", v[0], v[1], v[2]);

    match parse("log(r - 2)", &coords)?.eval(&p) {
        Ok(v) => println!("log(r - 2) = {v}"),
        Err(e) => println!("domain error reported: {e}"),
    }
    Ok(())
}
