use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::stats::quartiles;

use super::euclidean;

/// (group index, value index) for the boxplot distance: the first
/// categorical variable, which must have exactly two levels, and the first
/// continuous variable.
pub(crate) fn roles(data: &Dataset) -> Result<(usize, usize)> {
    let group = *data
        .categorical_indices()
        .first()
        .ok_or_else(|| Error::Structure("boxplot distance needs a categorical group variable".into()))?;
    let value = *data
        .continuous_indices()
        .first()
        .ok_or_else(|| Error::Structure("boxplot distance needs a continuous variable".into()))?;
    let levels = data.variables()[group].levels().map_or(0, <[String]>::len);
    if levels != 2 {
        return Err(Error::Structure(format!(
            "boxplot distance needs exactly 2 groups, found {levels}"
        )));
    }
    Ok((group, value))
}

/// Values of the continuous variable split by group level.
pub(crate) fn split_groups(data: &Dataset) -> Result<[Vec<f64>; 2]> {
    let (g, v) = roles(data)?;
    let codes = data.variables()[g].codes().expect("categorical");
    let values = data.variables()[v].as_continuous().expect("continuous");
    let mut groups = [Vec::new(), Vec::new()];
    for (&c, &x) in codes.iter().zip(values) {
        groups[c as usize].push(x);
    }
    if let Some(i) = groups.iter().position(Vec::is_empty) {
        let name = &data.variables()[g].levels().expect("categorical")[i];
        return Err(Error::Precondition(format!("group `{name}` is empty")));
    }
    Ok(groups)
}

/// |Q₁ᴬ − Q₁ᴮ|, |medᴬ − medᴮ|, |Q₃ᴬ − Q₃ᴮ|.
pub fn quartile_differences(data: &Dataset) -> Result<[f64; 3]> {
    let [a, b] = split_groups(data)?;
    let (qa, qb) = (quartiles(&a), quartiles(&b));
    Ok([0, 1, 2].map(|i| (qa[i] - qb[i]).abs()))
}

pub fn dist_boxplot(x: &Dataset, y: &Dataset) -> Result<f64> {
    x.check_same_structure(y)?;
    let (dx, dy) = (quartile_differences(x)?, quartile_differences(y)?);
    Ok(euclidean(dx, dy))
}
