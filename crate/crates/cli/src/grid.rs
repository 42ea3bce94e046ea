//! Grid descriptors: `start:stop:count` (inclusive), `a..b` (integer steps)
//! or an explicit comma-separated list.

pub fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err("empty grid".into());
    }
    let values = if let Some((a, b)) = spec.split_once("..") {
        let (a, b) = (number(a)?, number(b)?);
        if b < a {
            return Err(format!("range {spec} is empty"));
        }
        let steps = (b - a).floor() as usize;
        (0..=steps).map(|i| a + i as f64).collect()
    } else if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let [start, stop, count] = parts[..] else {
            return Err(format!("expected start:stop:count, got {spec}"));
        };
        let (start, stop) = (number(start)?, number(stop)?);
        let count: usize = count
            .trim()
            .parse()
            .map_err(|_| format!("count {count:?} is not a positive integer"))?;
        match count {
            0 => return Err("grid count must be at least 1".into()),
            1 => vec![start],
            n => (0..n)
                .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    } else {
        spec.split(',').map(number).collect::<Result<_, _>>()?
    };
    Ok(values)
}

fn number(s: &str) -> Result<f64, String> {
    let x: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("{s:?} is not a number"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("{s:?} is not finite"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inclusive_linspace() {
        assert_eq!(parse_grid("0:2:5").unwrap(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(parse_grid("3:7:1").unwrap(), vec![3.0]);
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("0:1").is_err());
    }

    #[test]
    fn ranges_and_lists() {
        assert_eq!(parse_grid("0..8").unwrap().len(), 9);
        assert_eq!(parse_grid("0.5..2.5").unwrap(), vec![0.5, 1.5, 2.5]);
        assert_eq!(parse_grid("-1, 0.5,2").unwrap(), vec![-1.0, 0.5, 2.0]);
        assert!(parse_grid("2..1").is_err());
        assert!(parse_grid("1,x").is_err());
        assert!(parse_grid("nan").is_err());
        assert!(parse_grid("").is_err());
    }
}
