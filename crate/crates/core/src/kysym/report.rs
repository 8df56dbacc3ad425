use serde::Serialize;

use super::{covariant_jet, symmetrize_first_pair, AntisymField, KyError, NONDEGENERACY_THRESHOLD};
use crate::geometry::{Connection, MetricSpec};
use crate::io::format_f64;
use crate::tensor::max_abs;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KyTolerances {
    pub ky: f64,
    pub covariant_constancy: f64,
    pub nondegeneracy: f64,
}

impl Default for KyTolerances {
    fn default() -> Self {
        Self {
            ky: 1e-10,
            covariant_constancy: 1e-8,
            nondegeneracy: NONDEGENERACY_THRESHOLD,
        }
    }
}

/// Residual maxima of one field over a set of sample points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KyReport {
    pub schema: &'static str,
    pub manifold: String,
    pub field: String,
    pub dim: usize,
    pub rank: usize,
    pub samples: usize,
    pub max_ky_residual: f64,
    pub max_covariant_constancy_residual: f64,
    /// `det f` per sample (rank-2 fields only).
    pub determinants: Option<Vec<f64>>,
    pub tolerances: KyTolerances,
    pub is_ky: bool,
    pub is_covariant_constant: bool,
    pub is_nondegenerate: Option<bool>,
}

/// Evaluates every residual at every point and reduces to maxima.
pub fn ky_report(
    spec: &MetricSpec,
    field: &AntisymField,
    points: &[Vec<f64>],
    tolerances: KyTolerances,
) -> Result<KyReport, KyError> {
    field.check_against(spec)?;
    let mut max_ky: f64 = 0.0;
    let mut max_cc: f64 = 0.0;
    let mut dets = (field.rank() == 2).then(Vec::new);
    for p in points {
        let conn = Connection::at(spec, p, false)?;
        let jet = field.jet(p)?;
        let df = covariant_jet(&conn, &jet);
        max_cc = max_cc.max(max_abs(&df));
        max_ky = max_ky.max(max_abs(&symmetrize_first_pair(&df)));
        if let Some(d) = dets.as_mut() {
            d.push(super::to_matrix(&jet.value).determinant());
        }
    }
    let is_nondegenerate = dets
        .as_ref()
        .map(|d| !d.is_empty() && d.iter().all(|v| v.abs() > tolerances.nondegeneracy));
    Ok(KyReport {
        schema: crate::SCHEMA,
        manifold: spec.label(),
        field: field.label().to_string(),
        dim: field.dim(),
        rank: field.rank(),
        samples: points.len(),
        max_ky_residual: max_ky,
        max_covariant_constancy_residual: max_cc,
        determinants: dets,
        tolerances,
        is_ky: !points.is_empty() && max_ky <= tolerances.ky,
        is_covariant_constant: !points.is_empty() && max_cc <= tolerances.covariant_constancy,
        is_nondegenerate,
    })
}

impl KyReport {
    pub fn to_table(&self) -> String {
        let flag = |b: bool| if b { "yes" } else { "no" };
        let mut s = String::new();
        s.push_str(&format!("manifold            {}\n", self.manifold));
        s.push_str(&format!(
            "field               {} (rank {})\n",
            self.field, self.rank
        ));
        s.push_str(&format!("samples             {}\n", self.samples));
        s.push_str(&format!(
            "max KY residual     {:.3e}  (tol {:.1e})  killing-yano: {}\n",
            self.max_ky_residual,
            self.tolerances.ky,
            flag(self.is_ky)
        ));
        s.push_str(&format!(
            "max |D f|           {:.3e}  (tol {:.1e})  covariant constant: {}\n",
            self.max_covariant_constancy_residual,
            self.tolerances.covariant_constancy,
            flag(self.is_covariant_constant)
        ));
        if let (Some(d), Some(nd)) = (&self.determinants, self.is_nondegenerate) {
            let min = d.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
            s.push_str(&format!(
                "min |det f|         {:.3e}  (tol {:.1e})  nondegenerate: {}\n",
                min,
                self.tolerances.nondegeneracy,
                flag(nd)
            ));
        }
        s
    }

    /// One header line and one data row.
    pub fn to_csv(&self) -> String {
        let opt = |b: Option<bool>| b.map(|b| b.to_string()).unwrap_or_default();
        let min_det = self
            .determinants
            .as_ref()
            .map(|d| format_f64(d.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()))))
            .unwrap_or_default();
        format!(
            "manifold,field,dim,rank,samples,max_ky_residual,max_covariant_constancy_residual,min_abs_det,is_ky,is_covariant_constant,is_nondegenerate\n\
             {},{},{},{},{},{},{},{},{},{},{}\n",
            self.manifold.replace(',', ";"),
            self.field.replace(',', ";"),
            self.dim,
            self.rank,
            self.samples,
            format_f64(self.max_ky_residual),
            format_f64(self.max_covariant_constancy_residual),
            min_det,
            self.is_ky,
            self.is_covariant_constant,
            opt(self.is_nondegenerate),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ChartRole;
    use crate::kysym::{flat_ky_field, taubnut_field};
    use crate::sampling;

    #[test]
    fn flags_follow_maxima() {
        let spec = MetricSpec::flat(3);
        let pts = sampling::regular_points(&spec, &mut sampling::rng(3), 10);
        let r = ky_report(
            &spec,
            &flat_ky_field(3, ChartRole::Position),
            &pts,
            KyTolerances::default(),
        )
        .unwrap();
        assert!(r.is_ky);
        assert!(!r.is_covariant_constant);
        assert_eq!(r.is_nondegenerate, Some(false));
        assert_eq!(r.max_covariant_constancy_residual, 1.0);
        assert!(r.to_table().contains("killing-yano: yes"));
    }

    #[test]
    fn taubnut_report_is_covariant_constant() {
        let spec = MetricSpec::taub_nut(1.0).unwrap();
        let pts = sampling::regular_points(&spec, &mut sampling::rng(5), 5);
        let f = taubnut_field(2, 1.0, ChartRole::Position).unwrap();
        let r = ky_report(&spec, &f, &pts, KyTolerances::default()).unwrap();
        assert!(
            r.is_covariant_constant,
            "{}",
            r.max_covariant_constancy_residual
        );
        assert!(r.is_ky);
        assert_eq!(r.is_nondegenerate, Some(true));
    }

    #[test]
    fn empty_sample_set_verifies_nothing() {
        let spec = MetricSpec::flat(3);
        let r = ky_report(
            &spec,
            &flat_ky_field(3, ChartRole::Position),
            &[],
            KyTolerances::default(),
        )
        .unwrap();
        assert!(!r.is_ky);
    }
}
