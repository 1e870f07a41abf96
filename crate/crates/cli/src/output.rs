use serde::Serialize;

use gapmoments::{Method, MomentValue};

pub const CSV_HEADER: &str = "b,n,mu,method,value,err,count";

/// One evaluated moment, as written to CSV or JSON.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub b: f64,
    pub n: u32,
    pub mu: f64,
    pub method: &'static str,
    pub value: f64,
    pub err: f64,
    pub count: usize,
}

impl Record {
    pub fn new(b: f64, n: u32, mu: f64, v: &MomentValue) -> Self {
        Record {
            b,
            n,
            mu,
            method: v.method.name(),
            value: v.value,
            err: v.error_estimate,
            count: v.terms_or_nodes,
        }
    }

    /// A failed evaluation: best estimate if any, infinite error.
    pub fn failed(b: f64, n: u32, mu: f64, method: Method, partial: f64, count: usize) -> Self {
        Record {
            b,
            n,
            mu,
            method: method.name(),
            value: partial,
            err: f64::INFINITY,
            count,
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            real(self.b),
            self.n,
            real(self.mu),
            self.method,
            real(self.value),
            real(self.err),
            self.count
        )
    }
}

/// 17 significant digits in scientific notation. Negative zero prints as zero.
pub fn real(x: f64) -> String {
    let x = x + 0.0;
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

pub fn csv(records: &[Record]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in records {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting_is_stable() {
        assert_eq!(real(0.1), "1.0000000000000001e-1");
        assert_eq!(real(0.0), "0.0000000000000000e0");
        assert_eq!(real(-0.0), "0.0000000000000000e0");
        assert_eq!(real(f64::INFINITY), "inf");
        assert_eq!("1.0000000000000001e-1".parse::<f64>().unwrap(), 0.1);
        let r = Record {
            b: 0.8,
            n: 1,
            mu: 0.0,
            method: "closed",
            value: 0.5,
            err: 0.0,
            count: 0,
        };
        assert_eq!(
            csv(&[r]),
            "b,n,mu,method,value,err,count\n\
             8.0000000000000004e-1,1,0.0000000000000000e0,closed,5.0000000000000000e-1,0.0000000000000000e0,0\n"
        );
    }
}
