use super::{GraphClass, GraphError, MGraph, MGraphBuilder, Mark};

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> GraphError {
    GraphError::Syntax { line, col, msg: msg.into() }
}

fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '.')
}

/// Parses the line-oriented graph format.
///
/// ```text
/// class: mdag
/// var X1
/// indicator R1 for X1
/// observed O
/// X1 -> R1   # comment
/// ```
pub fn parse_mgraph(text: &str) -> Result<MGraph, GraphError> {
    let mut builder: Option<MGraphBuilder> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let col = content.len() - content.trim_start().len() + 1;

        let Some(b) = builder.take() else {
            let rest = trimmed
                .strip_prefix("class")
                .map(str::trim_start)
                .and_then(|r| r.strip_prefix(':'))
                .ok_or_else(|| syntax(line_no, col, "expected `class: mdag|madmg|mcg` header"))?;
            let class = match rest.trim() {
                "mdag" => GraphClass::MDag,
                "madmg" => GraphClass::MAdmg,
                "mcg" => GraphClass::MCg,
                other => return Err(syntax(line_no, col, format!("unknown graph class `{other}`"))),
            };
            builder = Some(MGraphBuilder::new(class));
            continue;
        };

        let words: Vec<&str> = trimmed.split_whitespace().collect();
        let next = match words[0] {
            "class" | "class:" => return Err(syntax(line_no, col, "duplicate class header")),
            "var" if words.len() == 2 && is_ident(words[1]) => b.var(words[1]),
            "observed" if words.len() == 2 && is_ident(words[1]) => b.observed(words[1]),
            "indicator" if words.len() == 4 && words[2] == "for" && is_ident(words[1]) && is_ident(words[3]) => {
                b.indicator(words[1], words[3])
            }
            "var" | "observed" | "indicator" => {
                return Err(syntax(line_no, col, format!("malformed `{}` declaration", words[0])))
            }
            _ => {
                let (tail, mark, head) = split_edge(trimmed)
                    .ok_or_else(|| syntax(line_no, col, format!("unknown directive `{}`", words[0])))?;
                if !is_ident(tail) || !is_ident(head) {
                    return Err(syntax(line_no, col, "edge endpoints must be identifiers"));
                }
                b.edge(tail, head, mark)
            }
        };
        builder = Some(next);
    }
    builder
        .ok_or_else(|| syntax(1, 1, "missing `class:` header"))?
        .build()
}

fn split_edge(line: &str) -> Option<(&str, Mark, &str)> {
    // longest operator first so `<->` is not read as `->`
    for (op, mark) in [("<->", Mark::Bidirected), ("->", Mark::Directed), ("--", Mark::Undirected)] {
        if let Some(pos) = line.find(op) {
            let (a, b) = (line[..pos].trim(), line[pos + op.len()..].trim());
            return Some((a, mark, b));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mgraph::VertexKind;

    #[test]
    fn parses_all_line_kinds() {
        let g = parse_mgraph(
            "# leading comment\nclass: madmg\nvar X1\nvar X2\nindicator R1 for X1\nindicator R2 for X2\nobserved O\n\
             X1->X2\nR1 <-> R2  # latent\nO -> R1\n",
        )
        .unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.kind(g.id("R2").unwrap()), VertexKind::Indicator(1));
    }

    #[test]
    fn empty_graph_is_fine() {
        let g = parse_mgraph("class: mdag\n").unwrap();
        assert!(g.is_empty());
    }

    #[test]
    fn unknown_directive_reports_position() {
        let err = parse_mgraph("class: mdag\nvar X1\n  frobnicate X1\n").unwrap_err();
        assert_eq!(err, GraphError::Syntax { line: 3, col: 3, msg: "unknown directive `frobnicate`".into() });
    }

    #[test]
    fn header_must_come_first() {
        assert!(matches!(parse_mgraph("var X1\n"), Err(GraphError::Syntax { line: 1, .. })));
        assert!(matches!(parse_mgraph(""), Err(GraphError::Syntax { .. })));
        assert!(matches!(parse_mgraph("class: dag\n"), Err(GraphError::Syntax { .. })));
    }

    #[test]
    fn dangling_reference() {
        let err = parse_mgraph("class: mdag\nvar X1\nindicator R1 for X1\nX1 -> R9\n").unwrap_err();
        assert_eq!(err, GraphError::UnknownVertex("R9".into()));
    }

    #[test]
    fn forbidden_edge_message() {
        let err = parse_mgraph("class: mdag\nvar X1\nvar X2\nindicator R1 for X1\nindicator R2 for X2\nR1 -> X2\n")
            .unwrap_err();
        assert!(err.to_string().contains("indicator has outgoing edge to substantive"));
    }

    #[test]
    fn round_trip() {
        let text = "class: mcg\nvar B\nvar A\nindicator RB for B\nindicator RA for A\nobserved O\n\
                    O -> A\nRA -- RB\nA -> RB\n";
        let g = parse_mgraph(text).unwrap();
        let again = parse_mgraph(&g.to_text()).unwrap();
        assert_eq!(g, again);
        assert_eq!(again.to_text(), g.to_text());
    }
}
