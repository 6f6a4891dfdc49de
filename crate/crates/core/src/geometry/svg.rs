//! SVG rendering of a piece family.

use std::fmt::Write;

use super::Parallelogram;

pub fn case_color(tag: &str) -> &'static str {
    match tag {
        "FLAT_CORE" => "#000000",
        "NONDEG" => "#7f7f7f",
        "A1" => "#1f77b4",
        "A1_POWER" => "#17becf",
        "A2" => "#d62728",
        "B1" => "#2ca02c",
        "B2" => "#9467bd",
        "CYLINDER" => "#ff7f0e",
        _ => "#8c564b",
    }
}

/// One path per piece, stroked by case tag, in the view box [-2.2, 2.2]^2
/// with y pointing up.
pub fn render_svg<'a, I>(pieces: I) -> String
where
    I: IntoIterator<Item = (&'a Parallelogram, &'a str)>,
{
    let mut s = String::new();
    s.push_str(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-2.2 -2.2 4.4 4.4\" width=\"880\" height=\"880\">\n",
    );
    s.push_str("<g transform=\"scale(1,-1)\" fill=\"none\" stroke-width=\"0.002\">\n");
    for (p, tag) in pieces {
        let c = p.corners();
        let _ = writeln!(
            s,
            "<path d=\"M{:.6} {:.6} L{:.6} {:.6} L{:.6} {:.6} L{:.6} {:.6} Z\" stroke=\"{}\"/>",
            c[0][0], c[0][1], c[1][0], c[1][1], c[2][0], c[2][1], c[3][0], c[3][1],
            case_color(tag)
        );
    }
    s.push_str("</g>\n</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect;

    #[test]
    fn one_path_per_piece() {
        let a = Rect::new(0.0, 1.0, 0.0, 1.0).to_parallelogram();
        let b = Rect::new(-1.0, 0.0, 0.0, 0.5).to_parallelogram();
        let svg = render_svg([(&a, "NONDEG"), (&b, "A2")]);
        assert_eq!(svg.matches("<path").count(), 2);
        assert!(svg.contains("viewBox=\"-2.2 -2.2 4.4 4.4\""));
        assert!(svg.contains(case_color("A2")));
    }
}
