use super::{Coordinates, Individual, NetworkError, Result, VillageNetwork};

/// Mean Earth radius in statute miles.
pub const EARTH_RADIUS_MILES: f64 = 3958.7613;

pub const DEFAULT_GEO_RADIUS_MILES: f64 = 0.05;

/// Great-circle distance in miles (haversine on a sphere).
pub fn haversine_miles(a: Coordinates, b: Coordinates) -> f64 {
    let (phi1, phi2) = (a.lat.to_radians(), b.lat.to_radians());
    let dphi = phi2 - phi1;
    let dlambda = (b.lon - a.lon).to_radians();
    let h = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_MILES * h.sqrt().min(1.0).asin()
}

/// Proximity network: two individuals are linked when their great-circle
/// distance is at most `radius_miles`. Household closure is applied on top.
pub fn geo_adjacency(village_id: impl Into<String>, individuals: Vec<Individual>, radius_miles: f64) -> Result<VillageNetwork> {
    if !(radius_miles.is_finite() && radius_miles > 0.0) {
        return Err(NetworkError::InvalidParameter(format!("geo radius must be positive, got {radius_miles}")));
    }
    let coords = individuals
        .iter()
        .map(|i| i.coordinates.ok_or_else(|| NetworkError::MissingCoordinates(i.person_id.clone())))
        .collect::<Result<Vec<_>>>()?;
    let mut edges = Vec::new();
    for i in 0..coords.len() {
        for j in i + 1..coords.len() {
            if haversine_miles(coords[i], coords[j]) <= radius_miles {
                edges.push((i, j));
            }
        }
    }
    VillageNetwork::from_positions(village_id.into(), individuals, edges)
}

impl VillageNetwork {
    /// The proximity network over this village's individuals.
    pub fn geo_network(&self, radius_miles: f64) -> Result<VillageNetwork> {
        geo_adjacency(self.village_id.clone(), self.individuals.clone(), radius_miles)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn miles_to_degrees_on_equator(miles: f64) -> f64 {
        // Arc length on the equator is R·Δλ exactly.
        (miles / EARTH_RADIUS_MILES).to_degrees()
    }

    #[test]
    fn identical_points_link() {
        let people = vec![Individual::new("a", "1").at(-13.5, 34.3), Individual::new("b", "2").at(-13.5, 34.3)];
        let net = geo_adjacency("v", people, DEFAULT_GEO_RADIUS_MILES).unwrap();
        assert!(net.has_edge(0, 1));
    }

    #[test]
    fn equator_distances_against_arc_length() {
        let far = miles_to_degrees_on_equator(0.10);
        let near = miles_to_degrees_on_equator(0.049);
        let d = haversine_miles(Coordinates { lat: 0.0, lon: 0.0 }, Coordinates { lat: 0.0, lon: far });
        assert!((d - 0.10).abs() < 1e-9);

        let people = vec![
            Individual::new("a", "1").at(0.0, 0.0),
            Individual::new("b", "2").at(0.0, far),
            Individual::new("c", "3").at(0.0, near),
        ];
        let net = geo_adjacency("v", people, DEFAULT_GEO_RADIUS_MILES).unwrap();
        assert!(!net.has_edge(0, 1));
        assert!(net.has_edge(0, 2));
        // c sits 0.051 miles from b
        assert!(!net.has_edge(1, 2));
    }

    #[test]
    fn missing_coordinates_named() {
        let people = vec![Individual::new("a", "1").at(0.0, 0.0), Individual::new("b", "2")];
        match geo_adjacency("v", people, 0.05) {
            Err(NetworkError::MissingCoordinates(id)) => assert_eq!(id, "b"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn household_closure_applies_to_geo_network() {
        let far = miles_to_degrees_on_equator(1.0);
        let people = vec![Individual::new("a", "1").at(0.0, 0.0), Individual::new("b", "1").at(0.0, far)];
        let net = geo_adjacency("v", people, 0.05).unwrap();
        assert!(net.has_edge(0, 1));
    }
}
