//! CSV ingestion and export.
//!
//! Individuals: header `person_id,household_id,village_id[,lat,lon]`.
//! Edges: header `village_id,person_a,person_b`. Rows are grouped by
//! `village_id`; each village becomes one [`VillageNetwork`].

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::Deserialize;

use super::{Coordinates, Individual, NetworkError, Result, VillageNetwork};

#[derive(Debug, Deserialize)]
struct IndividualRecord {
    person_id: String,
    household_id: String,
    village_id: String,
    #[serde(default)]
    lat: Option<f64>,
    #[serde(default)]
    lon: Option<f64>,
}

#[derive(Debug, Deserialize)]
struct EdgeRecord {
    village_id: String,
    person_a: String,
    person_b: String,
}

fn parse_error(err: csv::Error) -> NetworkError {
    let row = err.position().map(|p| p.line()).unwrap_or(0);
    if err.is_io_error() {
        if let csv::ErrorKind::Io(io) = err.into_kind() {
            return NetworkError::Io(io);
        }
        unreachable!("checked is_io_error");
    }
    NetworkError::Parse {
        row,
        message: err.to_string(),
    }
}

/// Deserializes every record, pairing it with its 1-based line number.
fn records<T: serde::de::DeserializeOwned, R: Read>(source: R) -> Result<Vec<(T, u64)>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
    let headers = rdr.headers().map_err(parse_error)?.clone();
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(parse_error)?;
        let row = record.position().map(|p| p.line()).unwrap_or(0);
        let value = record.deserialize(Some(&headers)).map_err(|e| NetworkError::Parse {
            row,
            message: e.to_string(),
        })?;
        out.push((value, row));
    }
    Ok(out)
}

/// Reads every village present in the two sources, ordered by village id.
pub fn load_villages<R1: Read, R2: Read>(individuals: R1, edges: R2) -> Result<Vec<VillageNetwork>> {
    let mut people: BTreeMap<String, Vec<Individual>> = BTreeMap::new();
    for (rec, row) in records::<IndividualRecord, _>(individuals)? {
        let coordinates = match (rec.lat, rec.lon) {
            (Some(lat), Some(lon)) => Some(Coordinates { lat, lon }),
            (None, None) => None,
            _ => {
                return Err(NetworkError::Parse {
                    row,
                    message: format!("person `{}` has only one of lat/lon", rec.person_id),
                })
            }
        };
        people.entry(rec.village_id).or_default().push(Individual {
            person_id: rec.person_id,
            household_id: rec.household_id,
            coordinates,
        });
    }

    let mut links: BTreeMap<String, Vec<(String, String, u64)>> = BTreeMap::new();
    for (rec, row) in records::<EdgeRecord, _>(edges)? {
        if !people.contains_key(&rec.village_id) {
            return Err(NetworkError::UnknownVillage { village: rec.village_id, row });
        }
        links.entry(rec.village_id).or_default().push((rec.person_a, rec.person_b, row));
    }

    people
        .into_iter()
        .map(|(village, members)| {
            let edges = links.remove(&village).unwrap_or_default();
            // Resolve endpoints here so referential errors carry the row.
            let known: std::collections::HashSet<&str> = members.iter().map(|m| m.person_id.as_str()).collect();
            for (a, b, row) in &edges {
                for id in [a, b] {
                    if !known.contains(id.as_str()) {
                        return Err(NetworkError::DanglingEdge { id: id.clone(), row: Some(*row) });
                    }
                }
            }
            VillageNetwork::new(village, members, edges.into_iter().map(|(a, b, _)| (a, b)))
        })
        .collect()
}

/// Reads one village. With `village_id = None` the input must hold exactly one.
pub fn load_village<R1: Read, R2: Read>(individuals: R1, edges: R2, village_id: Option<&str>) -> Result<VillageNetwork> {
    let mut all = load_villages(individuals, edges)?;
    match village_id {
        Some(id) => all
            .into_iter()
            .find(|v| v.village_id() == id)
            .ok_or_else(|| NetworkError::VillageNotFound(id.to_string())),
        None if all.len() == 1 => Ok(all.remove(0)),
        None => Err(NetworkError::NotSingleVillage(all.len())),
    }
}

fn csv_io(err: csv::Error) -> NetworkError {
    NetworkError::Io(err.into())
}

pub fn write_individuals<W: Write>(out: W, villages: &[VillageNetwork]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let with_coords = villages.iter().any(|v| v.individuals().iter().any(|i| i.coordinates.is_some()));
    if with_coords {
        w.write_record(["person_id", "household_id", "village_id", "lat", "lon"]).map_err(csv_io)?;
    } else {
        w.write_record(["person_id", "household_id", "village_id"]).map_err(csv_io)?;
    }
    for v in villages {
        for ind in v.individuals() {
            let mut row = vec![ind.person_id.clone(), ind.household_id.clone(), v.village_id().to_string()];
            if with_coords {
                match ind.coordinates {
                    Some(c) => {
                        row.push(c.lat.to_string());
                        row.push(c.lon.to_string());
                    }
                    None => row.extend([String::new(), String::new()]),
                }
            }
            w.write_record(&row).map_err(csv_io)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes every edge once, household closure edges included.
pub fn write_edges<W: Write>(out: W, villages: &[VillageNetwork]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["village_id", "person_a", "person_b"]).map_err(csv_io)?;
    for v in villages {
        for (a, b) in v.edges() {
            w.write_record([v.village_id(), v.person_id(a), v.person_id(b)]).map_err(csv_io)?;
        }
    }
    w.flush()?;
    Ok(())
}
