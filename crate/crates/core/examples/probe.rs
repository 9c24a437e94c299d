use bound_core::*;
fn show(name: &str, expr: &str, vars: &[(&str, f64, f64)], iters: u32) {
    let mut b = InputBox::new();
    for (n, lo, hi) in vars {
        b.insert(*n, *lo, *hi).unwrap();
    }
    let e = parse_expr(expr).unwrap();
    let t = std::time::Instant::now();
    let r = run(&e, &b, &Config::with_iterations(iters)).unwrap();
    println!(
        "{name:<14} it={:<2} nodes {:>3} -> {:>5} naive {} opt {} rel {:.4} cyc {} {:.3}s",
        r.iterations_run, r.node_count_start, r.node_count_end,
        r.naive, r.optimized, r.relative_width, r.cycle_detected, t.elapsed().as_secs_f64()
    );
}
fn main() {
    show("sub-cancel", "(- x x)", &[("x", 0.0, 1.0)], 4);
    show("eq6", "(/ (+ x y) (+ (+ x y) 1))", &[("x", 0.0, 1.0), ("y", 1.0, 2.0)], 4);
    show("eq8a", "(- 1 (/ (* 2 y) (+ x y)))", &[("x", 0.0, 1.0), ("y", 1.0, 2.0)], 4);
    show("fig1", "(/ x (+ x y))", &[("x", 1.0, 2.0), ("y", 1.0, 2.0)], 4);
    show("krawczyk", "(/ (- 3 y) (- 1 (pow y 2)))", &[("y", -0.5, 0.5)], 4);
    show("eq8b", "(/ (- x y) (+ x y))", &[("x", 0.0, 1.0), ("y", 1.0, 2.0)], 4);
    show("eq8c", "(- (/ (* 2 x) (+ x y)) 1)", &[("x", 0.0, 1.0), ("y", 1.0, 2.0)], 4);
    show("eq6-alt", "(/ (+ x y) (+ (+ x y) 1))", &[("x", 2.0, 3.0), ("y", 0.0, 2.0)], 4);
    show("log-exp", "(ln (exp (* x y)))", &[("x", 0.0, 1.0), ("y", 0.0, 1.0)], 4);
    show("comm-cancel", "(/ (* x y) (* y x))", &[("x", 1.0, 2.0), ("y", 1.0, 2.0)], 4);
    show("sqrt-square", "(sqrt (pow x 2))", &[("x", 1.0, 2.0)], 4);
    show("recip-chain", "(/ (/ 1 x) x)", &[("x", 1.0, 2.0)], 4);
}
