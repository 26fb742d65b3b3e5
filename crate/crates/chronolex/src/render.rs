//! Output encodings for query results.

use std::fmt::Write;

use chronolex_core::query::QueryResponse;
use chronolex_core::{DistanceMatrix, TimeSliceConfig};

/// Splits a comma-separated word list, trimming surrounding whitespace.
/// Shared by the CLI and the HTTP handler so both see the same request.
pub fn parse_word_list(raw: &str) -> Vec<String> {
    if raw.trim().is_empty() {
        return Vec::new();
    }
    raw.split(',').map(|w| w.trim().to_string()).collect()
}

/// Compact JSON body used by both the CLI and the HTTP API.
pub fn response_json(response: &QueryResponse) -> String {
    serde_json::to_string(response).expect("query response serializes")
}

fn csv_field(out: &mut String, field: &str) {
    if field.contains([',', '"', '\n', '\r']) {
        out.push('"');
        out.push_str(&field.replace('"', "\"\""));
        out.push('"');
    } else {
        out.push_str(field);
    }
}

/// One row per `(word, slice)`; missing points leave `x` and `y` empty.
pub fn response_csv(words: &[String], response: &QueryResponse) -> String {
    let mut out = String::from("word,slice,label,x,y\n");
    for (word, row) in words.iter().zip(&response.points) {
        for (slice, (label, point)) in response.slice_labels.iter().zip(row).enumerate() {
            csv_field(&mut out, word);
            let _ = write!(out, ",{slice},{label},");
            if let Some([x, y]) = point {
                let _ = write!(out, "{x},{y}");
            } else {
                out.push(',');
            }
            out.push('\n');
        }
    }
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

const PALETTE: [&str; 10] =
    ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];

/// Static plot: a polyline through each word's keyframes, a marker per
/// slice with data, and the word label at its last position.
pub fn response_svg(words: &[String], response: &QueryResponse, width: u32, height: u32) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(out, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
    for (i, (word, row)) in words.iter().zip(&response.points).enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let present: Vec<(usize, [i32; 2])> = row.iter().enumerate().filter_map(|(s, p)| p.map(|p| (s, p))).collect();
        let _ = writeln!(out, r#"<g class="word" data-word="{}">"#, xml_escape(word));
        if present.len() > 1 {
            let pts: Vec<String> = present.iter().map(|(_, [x, y])| format!("{x},{y}")).collect();
            let _ = writeln!(
                out,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2" stroke-opacity="0.7"/>"#,
                pts.join(" ")
            );
        }
        for (slice, [x, y]) in &present {
            let label = response.slice_labels.get(*slice).map(String::as_str).unwrap_or("");
            let _ = writeln!(
                out,
                r#"<circle cx="{x}" cy="{y}" r="4" fill="{color}"><title>{} {}</title></circle>"#,
                xml_escape(word),
                xml_escape(label)
            );
        }
        if let Some((_, [x, y])) = present.last() {
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" font-family="sans-serif" font-size="14" fill="{color}">{}</text>"#,
                x + 6,
                y - 6,
                xml_escape(word)
            );
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

/// Row-major TSV dump of a distance matrix. Keys are written as
/// `word@label`; the first header cell is empty.
pub fn distances_tsv(words: &[String], config: &TimeSliceConfig, a: &DistanceMatrix) -> String {
    let names: Vec<String> = a
        .keys()
        .iter()
        .map(|k| {
            let label = config.slice_label(k.slice_index).unwrap_or_default();
            format!("{}@{}", words[k.word_index], label)
        })
        .collect();
    let mut out = String::new();
    for name in &names {
        out.push('\t');
        out.push_str(name);
    }
    out.push('\n');
    for (i, name) in names.iter().enumerate() {
        out.push_str(name);
        for d in a.row(i) {
            let _ = write!(out, "\t{d}");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use chronolex_core::query::Diagnostics;
    use chronolex_core::{distance_matrix, PointKey};

    fn response() -> QueryResponse {
        QueryResponse {
            slice_labels: vec!["1800-1804".into(), "1805-1809".into()],
            points: vec![vec![Some([1, 2]), None], vec![Some([3, 4]), Some([5, 6])]],
            trajectories: None,
            diagnostics: Diagnostics { eigenvalues: vec![2.0, 0.5], stress: 0.25, stress_unordered: 0.125, excluded_points: 1 },
        }
    }

    #[test]
    fn word_lists() {
        assert_eq!(parse_word_list("gay, happy ,x"), ["gay", "happy", "x"]);
        assert!(parse_word_list("  ").is_empty());
        assert_eq!(parse_word_list("a,,b"), ["a", "", "b"]);
    }

    #[test]
    fn json_uses_null_for_missing() {
        let json = response_json(&response());
        assert_eq!(
            json,
            r#"{"slice_labels":["1800-1804","1805-1809"],"points":[[[1,2],null],[[3,4],[5,6]]],"trajectories":null,"diagnostics":{"eigenvalues":[2.0,0.5],"stress":0.25,"stress_unordered":0.125,"excluded_points":1}}"#
        );
    }

    #[test]
    fn csv_rows() {
        let words = vec!["a,b".to_string(), "c".to_string()];
        let csv = response_csv(&words, &response());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "word,slice,label,x,y");
        assert_eq!(lines[1], "\"a,b\",0,1800-1804,1,2");
        assert_eq!(lines[2], "\"a,b\",1,1805-1809,,");
        assert_eq!(lines.len(), 5);
    }

    #[test]
    fn svg_has_markers_and_labels() {
        let words = vec!["<a>".to_string(), "c".to_string()];
        let svg = response_svg(&words, &response(), 100, 80);
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<circle").count(), 3);
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.contains("&lt;a&gt;"));
    }

    #[test]
    fn tsv_dump() {
        let a = distance_matrix(&[(PointKey::new(0, 0), vec![0.0, 0.0]), (PointKey::new(1, 1), vec![3.0, 4.0])]).unwrap();
        let words = vec!["x".to_string(), "y".to_string()];
        let tsv = distances_tsv(&words, &TimeSliceConfig::default(), &a);
        assert_eq!(tsv, "\tx@1800-1804\ty@1805-1809\nx@1800-1804\t0\t5\ny@1805-1809\t5\t0\n");
    }
}
