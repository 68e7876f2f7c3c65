//! Measured-spectrum files.
//!
//! ```text
//! # omega[s^-1] im_eps_xx re_eps_xy
//! 1.0e14  0.52  1.0e-3
//! ...
//! ```
//!
//! The first non-blank line must be exactly that header (whitespace may
//! vary). Later `#` lines are comments; every other line holds three numbers.

use casimir_mag_core::materials::{SpectrumTail, TabulatedSpectrum};

pub const HEADER: [&str; 4] = ["#", "omega[s^-1]", "im_eps_xx", "re_eps_xy"];

pub fn parse(text: &str, tail: SpectrumTail) -> Result<TabulatedSpectrum, String> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, l)) if l.split_whitespace().eq(HEADER.iter().copied()) => {}
        Some((i, l)) => {
            return Err(format!("line {}: expected header `{}`, found `{}`", i + 1, HEADER.join(" "), l.trim()))
        }
        None => return Err("empty spectrum file".into()),
    }
    let (mut grid, mut xx, mut xy) = (Vec::new(), Vec::new(), Vec::new());
    for (i, line) in lines {
        let line = line.trim();
        if line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(format!("line {}: expected 3 columns, found {}", i + 1, fields.len()));
        }
        let mut vals = [0.0; 3];
        for (v, f) in vals.iter_mut().zip(&fields) {
            *v = f.parse().map_err(|_| format!("line {}: `{f}` is not a number", i + 1))?;
        }
        grid.push(vals[0]);
        xx.push(vals[1]);
        xy.push(vals[2]);
    }
    TabulatedSpectrum::new(grid, xx, xy, tail).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn body(n: usize) -> String {
        let mut s = String::from("#  omega[s^-1]\tim_eps_xx re_eps_xy\n");
        for i in 0..n {
            s += &format!("{:e} {} {}\n", 1e14 * (i + 1) as f64, 0.5, 1e-3);
        }
        s
    }

    #[test]
    fn well_formed_file_parses() {
        let mut s = body(8);
        s.insert_str(s.find('\n').unwrap() + 1, "# measured at 300 K\n\n");
        let sp = parse(&s, SpectrumTail::Zero).unwrap();
        assert_eq!(sp.grid().len(), 8);
        assert_eq!(sp.grid()[7], 8e14);
        assert_eq!(sp.re_eps_xy()[0], 1e-3);
    }

    #[test]
    fn malformed_files_are_rejected() {
        assert!(parse("", SpectrumTail::Zero).is_err());
        assert!(parse(&body(8).replacen("im_eps_xx", "eps", 1), SpectrumTail::Zero).is_err());
        assert!(parse(&(body(8) + "1e16 0.5\n"), SpectrumTail::Zero).unwrap_err().contains("line 10"));
        assert!(parse(&(body(8) + "1e16 0.5 x\n"), SpectrumTail::Zero).is_err());
        assert!(parse(&(body(8) + "1e16 0.5 1 2\n"), SpectrumTail::Zero).is_err());
        // too few points, and a decreasing grid, are caught by the model
        assert!(parse(&body(3), SpectrumTail::Zero).is_err());
        assert!(parse(&(body(8) + "1e13 0.5 0\n"), SpectrumTail::Zero).is_err());
    }
}
