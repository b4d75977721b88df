use hamlaw_core::theory;

#[test]
fn scratch_mixture_nan() {
    let pmf = theory::mixture_pmf(2.0, 2.557390310992748, 4096).unwrap();
    let bad: Vec<usize> =
        (0..pmf.len()).filter(|&j| !pmf[j].is_finite()).take(5).collect();
    println!("first non-finite indices: {bad:?}");
    if let Some(&j) = bad.first() {
        println!("pmf[{j}] = {}", pmf[j]);
    }
    println!("pmf[0..6] = {:?}", &pmf[..6]);
    println!("sum = {}", pmf.iter().sum::<f64>());
}

#[test]
fn scratch_gh_orders() {
    for order in [20, 40, 80, 160, 320, 640] {
        let (xs, ws) = theory::gauss_hermite(order);
        let bad_x = xs.iter().filter(|v| !v.is_finite()).count();
        let bad_w = ws.iter().filter(|v| !v.is_finite()).count();
        let wsum: f64 = ws.iter().sum();
        println!(
            "order {order}: bad_x={bad_x} bad_w={bad_w} max_x={} wsum={wsum} (target sqrt(pi)={})",
            xs.iter().cloned().fold(f64::NAN, f64::max),
            std::f64::consts::PI.sqrt()
        );
    }
}

#[test]
fn scratch_numbers() {
    let p = theory::p_star(18, 3, 2, 1.2).unwrap();
    let s2n = theory::finite_size_sigma2(18, 3, 2, p, 6).unwrap();
    let law = theory::limit_law(3, 2, 1.2, 6).unwrap();
    println!("p = {p}");
    println!("finite sigma2(n=18,K=6) = {s2n}, exp(-/2) = {}", (-s2n / 2.0).exp());
    println!("limit  sigma2(c=1.2,K=6) = {}, exp(-/2) = {}", law.sigma2, (-law.sigma2 / 2.0).exp());
    for j in 1..=6 {
        let mu = theory::planted_y_mean(18, 3, 2, p, j).unwrap();
        println!("mu_{j}(n=18) = {mu}  t_{j}(limit) = {}", law.weights[j - 1]);
    }
    // Criterion 6 setting for the lognormal KS question.
    let p20 = theory::p_star(20, 3, 2, 1.3).unwrap();
    let s2n20 = theory::finite_size_sigma2(20, 3, 2, p20, 6).unwrap();
    let law20 = theory::limit_law(3, 2, 1.3, 6).unwrap();
    println!("n=20: finite sigma2 = {s2n20}  limit sigma2 = {}", law20.sigma2);
}
