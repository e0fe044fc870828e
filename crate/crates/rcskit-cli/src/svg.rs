//! Minimal SVG line plot for accuracy-vs-SNR curves. The exact data
//! points are embedded as comments so plots stay machine-checkable.

pub fn accuracy_plot(snr_db: &[f64], accuracy: &[f64]) -> String {
    let (w, h) = (640.0, 420.0);
    let (ml, mr, mt, mb) = (60.0, 20.0, 20.0, 50.0);
    let x_min = snr_db.first().copied().unwrap_or(0.0);
    let x_max = snr_db.last().copied().unwrap_or(1.0).max(x_min + 1e-9);
    let px = |x: f64| ml + (x - x_min) / (x_max - x_min) * (w - ml - mr);
    let py = |y: f64| h - mb - y * (h - mt - mb);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    ));
    svg.push_str("<!-- data: snr_db,accuracy -->\n");
    for (x, y) in snr_db.iter().zip(accuracy) {
        svg.push_str(&format!("<!-- data {x},{y} -->\n"));
    }
    svg.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n"
    ));
    // axes
    svg.push_str(&format!(
        "<line x1=\"{ml}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        h - mb,
        w - mr,
        h - mb
    ));
    svg.push_str(&format!(
        "<line x1=\"{ml}\" y1=\"{mt}\" x2=\"{ml}\" y2=\"{}\" stroke=\"black\"/>\n",
        h - mb
    ));
    for i in 0..=4 {
        let frac = i as f64 / 4.0;
        let y = py(frac);
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"end\">{:.2}</text>\n",
            ml - 6.0,
            y + 4.0,
            frac
        ));
        svg.push_str(&format!(
            "<line x1=\"{ml}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"#dddddd\"/>\n",
            w - mr
        ));
    }
    for &x in snr_db {
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{x}</text>\n",
            px(x),
            h - mb + 18.0
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\">SNR (dB)</text>\n",
        (ml + w - mr) / 2.0,
        h - 12.0
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">accuracy</text>\n",
        (mt + h - mb) / 2.0,
        (mt + h - mb) / 2.0
    ));

    let points: Vec<String> = snr_db
        .iter()
        .zip(accuracy)
        .map(|(x, y)| format!("{},{}", px(*x), py(*y)))
        .collect();
    svg.push_str(&format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n",
        points.join(" ")
    ));
    for (x, y) in snr_db.iter().zip(accuracy) {
        svg.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"#1f77b4\"/>\n",
            px(*x),
            py(*y)
        ));
    }
    svg.push_str("</svg>\n");
    svg
}
