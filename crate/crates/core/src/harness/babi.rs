//! Readers for the bAbI QA and dialog line formats.

use std::path::Path;

use super::HarnessError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QaQuestion {
    pub line: usize,
    pub text: String,
    pub answer: String,
    pub support: Vec<usize>,
    /// Number of story statements above the question.
    pub context: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QaRecord {
    pub story_id: usize,
    /// `(line number, text)` of each statement.
    pub sentences: Vec<(usize, String)>,
    pub questions: Vec<QaQuestion>,
}

fn split_number(line: &str, line_no: usize) -> Result<(usize, &str), HarnessError> {
    let (n, rest) = line.split_once(' ').ok_or_else(|| HarnessError::format(line_no, "missing line number"))?;
    let n = n.parse().map_err(|_| HarnessError::format(line_no, format!("bad line number `{n}`")))?;
    Ok((n, rest))
}

pub fn parse_babi_qa(text: &str) -> Result<Vec<QaRecord>, HarnessError> {
    let mut out: Vec<QaRecord> = Vec::new();
    let mut expected = 1;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let (n, rest) = split_number(line, line_no)?;
        if n == 1 {
            out.push(QaRecord { story_id: out.len() + 1, sentences: Vec::new(), questions: Vec::new() });
        } else if n != expected || out.is_empty() {
            return Err(HarnessError::format(line_no, format!("expected line {expected}, found {n}")));
        }
        expected = n + 1;
        let rec = out.last_mut().expect("story started");
        if rest.contains('\t') {
            let cols: Vec<&str> = rest.split('\t').collect();
            if cols.len() < 2 {
                return Err(HarnessError::format(line_no, "question without answer"));
            }
            let support = match cols.get(2) {
                Some(s) => s
                    .split_whitespace()
                    .map(|x| x.parse().map_err(|_| HarnessError::format(line_no, format!("bad support `{x}`"))))
                    .collect::<Result<_, _>>()?,
                None => Vec::new(),
            };
            rec.questions.push(QaQuestion {
                line: n,
                text: cols[0].trim().to_string(),
                answer: cols[1].trim().to_string(),
                support,
                context: rec.sentences.len(),
            });
        } else {
            rec.sentences.push((n, rest.trim().to_string()));
        }
    }
    Ok(out)
}

/// Statement lines of a story file. Accepts plain sentences or bAbI
/// numbered lines; question lines (those with a tab) are skipped.
pub fn story_sentences(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.contains('\t') && !l.starts_with('#'))
        .map(|l| match l.split_once(' ') {
            Some((n, rest)) if n.chars().all(|c| c.is_ascii_digit()) => rest.to_string(),
            _ => l.to_string(),
        })
        .collect()
}

pub fn read_babi_qa(path: &Path) -> Result<Vec<QaRecord>, HarnessError> {
    parse_babi_qa(&super::read_file(path)?)
}

/// One dialog: restaurant KB lines and the turn pairs, in file order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DialogRecord {
    pub dialog_id: usize,
    /// `(restaurant, attribute, value)` triples.
    pub kb_facts: Vec<(String, String, String)>,
    /// `(user, bot)` turn pairs.
    pub turns: Vec<(String, String)>,
}

pub fn parse_babi_dialog(text: &str) -> Result<Vec<DialogRecord>, HarnessError> {
    let mut out: Vec<DialogRecord> = Vec::new();
    let mut current: Option<DialogRecord> = None;
    let mut expected = 1;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            if let Some(d) = current.take() {
                out.push(d);
            }
            expected = 1;
            continue;
        }
        let (n, rest) = split_number(line, line_no)?;
        if n != expected {
            return Err(HarnessError::format(line_no, format!("expected line {expected}, found {n}")));
        }
        expected += 1;
        let d = current.get_or_insert_with(|| DialogRecord { dialog_id: out.len() + 1, ..Default::default() });
        match rest.split_once('\t') {
            Some((user, bot)) => d.turns.push((user.to_string(), bot.to_string())),
            None => {
                let cols: Vec<&str> = rest.split_whitespace().collect();
                let [r, attr, value] = cols[..] else {
                    return Err(HarnessError::format(line_no, "expected `<restaurant> <attribute> <value>`"));
                };
                d.kb_facts.push((r.to_string(), attr.to_string(), value.to_string()));
            }
        }
    }
    out.extend(current);
    Ok(out)
}

pub fn read_babi_dialog(path: &Path) -> Result<Vec<DialogRecord>, HarnessError> {
    parse_babi_dialog(&super::read_file(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = "1 John moved to the bedroom.\n2 John got the football there.\n3 John grabbed the apple there.\n\
                           4 John picked up the milk there.\n5 John gave the apple to Mary.\n6 John left the football.\n\
                           7 How many objects is John carrying?\tone\t4\n";

    #[test]
    fn worked_example_story() {
        let recs = parse_babi_qa(EXAMPLE).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].sentences.len(), 6);
        let q = &recs[0].questions[0];
        assert_eq!((q.answer.as_str(), q.context, q.support.clone()), ("one", 6, vec![4]));
    }

    #[test]
    fn numbering_errors() {
        assert!(matches!(parse_babi_qa("2 Mary moved to the hall.\n"), Err(HarnessError::Format { line: 1, .. })));
        assert!(matches!(parse_babi_qa("1 a.\n3 b.\n"), Err(HarnessError::Format { line: 2, .. })));
        let recs = parse_babi_qa("1 a.\n2 Where is x? \thall\t1\n1 b.\n").unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].questions[0].text, "Where is x?");
    }

    #[test]
    fn dialog_blocks() {
        let text = "1 resto_1 R_cuisine thai\n2 hi\thello what can i help you with today\n3 <SILENCE>\tok\n\n\
                    1 good morning\thello what can i help you with today\n";
        let d = parse_babi_dialog(text).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d[0].kb_facts, [("resto_1".into(), "R_cuisine".into(), "thai".into())]);
        assert_eq!(d[0].turns.len(), 2);
        assert_eq!(d[1].dialog_id, 2);
        assert!(parse_babi_dialog("1 a b\n").is_err());
    }

    #[test]
    fn story_lines() {
        let s = story_sentences("1 John moved to the hall.\n2 Where is John?\thall\t1\nMary got the milk.\n");
        assert_eq!(s, ["John moved to the hall.", "Mary got the milk."]);
    }
}
