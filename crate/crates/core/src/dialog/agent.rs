use std::collections::BTreeSet;

use crate::engine::{parse_query, parse_rules, parse_term, render_with, Phrasebook, Program, Rule, Solver, Term};
use crate::lexicon::Lexicon;
use crate::semgen::get_sentence_semantics;
use crate::syntax::Frontend;

use super::templates::capitalize;
use super::{DialogError, DialogState, Exchange, FsmState, Provenance, SlotName, SlotTable, Templates};

const BUNDLED_RULES: &str = include_str!("../../resources/dialog/commonsense.rules");
const BUNDLED_ENTITIES: &str = include_str!("../../resources/dialog/entities.tsv");

/// Rendering depth for per-turn justifications.
const JUSTIFY_DEPTH: usize = 6;

/// `api_call <cuisine> <location> <party_size> <price>`.
pub fn format_api_call(slots: &SlotTable) -> Result<String, DialogError> {
    let missing: Vec<String> =
        SlotName::ALL.into_iter().filter(|s| slots.get(*s).is_none()).map(|s| s.name().to_string()).collect();
    if !missing.is_empty() {
        return Err(DialogError::IncompleteSlots(missing));
    }
    let values: Vec<&str> = SlotName::ALL.into_iter().filter_map(|s| slots.value(s)).collect();
    Ok(format!("api_call {}", values.join(" ")))
}

/// What one turn did.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TurnOutcome {
    pub response: String,
    /// Template key of the response.
    pub act: String,
    pub from: FsmState,
    pub to: FsmState,
    pub justification: String,
    /// Set when the utterance was not understood.
    pub diagnostic: Option<DialogError>,
}

/// What the KB made of an utterance.
#[derive(Debug, Default)]
struct Reading {
    intents: BTreeSet<String>,
    /// `(slot, value, position in the utterance)`.
    slots: Vec<(SlotName, String, usize)>,
    prefs: Vec<String>,
    books: Vec<String>,
    justification: Vec<String>,
}

impl Reading {
    fn has(&self, intent: &str) -> bool {
        self.intents.contains(intent)
    }
}

struct Decision {
    act: &'static str,
    args: Vec<(&'static str, String)>,
    to: FsmState,
}

impl Decision {
    fn new(act: &'static str, to: FsmState) -> Self {
        Decision { act, args: Vec::new(), to }
    }

    fn arg(mut self, name: &'static str, value: impl Into<String>) -> Self {
        self.args.push((name, value.into()));
        self
    }
}

pub struct DialogAgent {
    base: Program,
    cuisine_rank: Vec<String>,
    pub templates: Templates,
    pub phrasebook: Phrasebook,
    pub frontend: Frontend,
    pub lexicon: Lexicon,
    pub depth_limit: usize,
}

impl Default for DialogAgent {
    fn default() -> Self {
        Self::new(BUNDLED_RULES, BUNDLED_ENTITIES, Templates::bundled()).expect("bundled dialog resources are valid")
    }
}

/// Lowercased words with surrounding punctuation removed.
pub(crate) fn words(utterance: &str) -> Vec<String> {
    utterance
        .split_whitespace()
        .map(|w| w.trim_matches(|c: char| matches!(c, ',' | '.' | '?' | '!' | ';' | ':' | '"')).to_lowercase())
        .filter(|w| !w.is_empty())
        .collect()
}

fn value_term(v: &str) -> Term {
    v.parse::<i64>().map(Term::Int).unwrap_or_else(|_| Term::atom(v))
}

fn term_text(t: &Term) -> String {
    match t {
        Term::Atom(a) => a.to_string(),
        Term::Int(n) => n.to_string(),
        other => other.to_string(),
    }
}

fn fact(name: &str, args: Vec<Term>) -> Rule {
    Rule::fact(Term::compound(name, args))
}

impl DialogAgent {
    /// Builds an agent from rule text, an entity table (`type<TAB>value`,
    /// cuisines listed in suggestion order) and response templates.
    pub fn new(rules: &str, entities: &str, templates: Templates) -> Result<Self, DialogError> {
        let mut all = parse_rules(rules)?;
        let mut cuisine_rank = Vec::new();
        for (i, line) in entities.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (kind, value) = line.split_once('\t').ok_or_else(|| DialogError::Format {
                what: "entity table",
                line: i + 1,
                msg: "expected `type<TAB>value`".into(),
            })?;
            if kind == "cuisine" {
                cuisine_rank.push(value.to_string());
            }
            all.push(fact(kind, vec![Term::atom(value)]));
        }
        let mut phrasebook = Phrasebook::default();
        for (name, arity, text) in [
            ("missing_parameter", 1, "the {1} is not known yet"),
            ("query_parameter", 1, "{1} is a query parameter"),
            ("slot_value", 2, "the {1} is {2}"),
            ("slot_candidate", 2, "the user gave {2} as the {1}"),
            ("mentioned", 1, "the user said \"{1}\""),
            ("next_word", 2, "the user said \"{1} {2}\""),
            ("cuisine_suggestion", 2, "{2} food can be suggested to {1}"),
            ("cuisine_exception", 2, "{1} would not like {2} food again"),
            ("excluded", 1, "the user excluded {1}"),
            ("rejected", 1, "the user rejected {1}"),
            ("wants_ingredient", 1, "the user wants {1}"),
            ("has_ingredient", 2, "{1} food has {2}"),
            ("property", 2, "{2} is a {1}"),
            ("option", 2, "{1} matches the request with rating {2}"),
            ("info", 3, "the {2} of {1} is {3}"),
            ("intent", 1, "the user intends {1}"),
        ] {
            phrasebook.insert(name, arity, text);
        }
        Ok(DialogAgent {
            base: Program::new(all)?,
            cuisine_rank,
            templates,
            phrasebook,
            frontend: Frontend::default(),
            lexicon: Lexicon::bundled(),
            depth_limit: crate::engine::DEFAULT_DEPTH_LIMIT,
        })
    }

    pub fn program(&self) -> &Program {
        &self.base
    }

    /// Facts describing the conversation so far plus, if given, one utterance.
    pub fn turn_facts(&self, state: &DialogState, utterance: Option<&str>) -> Vec<Rule> {
        let mut out = Vec::new();
        if let Some(u) = utterance {
            let ws = words(u);
            for w in &ws {
                out.push(fact("mentioned", vec![Term::atom(w)]));
            }
            for pair in ws.windows(2) {
                out.push(fact("next_word", vec![Term::atom(&pair[0]), Term::atom(&pair[1])]));
            }
            // Whatever the fragment parser and frame matcher recover; most
            // turns yield nothing here and that is fine.
            if let Ok(tree) = self.frontend.parse_fragment(u) {
                let time = state.history.len() as u32 + 1;
                out.extend(get_sentence_semantics(&tree, &self.lexicon, time).facts.iter().map(|f| f.to_rule()));
            }
        }
        for (slot, v) in state.slots.filled() {
            out.push(fact("slot_value", vec![Term::atom(slot.name()), Term::atom(v)]));
        }
        for p in &state.preferences {
            if let Ok(t) = parse_term(p) {
                out.push(Rule::fact(t));
            }
        }
        if let Some(s) = state.awaiting {
            out.push(fact("awaiting", vec![Term::atom(s.name())]));
        }
        for (r, a, v) in &state.kb_facts {
            out.push(fact("restaurant", vec![Term::atom(r), Term::atom(&a.to_lowercase()), value_term(v)]));
        }
        if let Some(call) = &state.issued_call {
            out.push(fact("api", call.iter().map(|v| Term::atom(v)).collect()));
        }
        out
    }

    fn program_for(&self, state: &DialogState, utterance: Option<&str>) -> Result<Program, DialogError> {
        Ok(self.base.extended(self.turn_facts(state, utterance))?)
    }

    /// Answers of `query` as `(bindings in var order, justification text)`.
    fn ask(&self, program: &Program, query: &str, vars: &[&str]) -> Result<Vec<(Vec<Term>, String)>, DialogError> {
        let q = parse_query(query)?;
        let mut solver = Solver::with_depth_limit(program, self.depth_limit);
        let answers = solver.solve(&q)?;
        Ok(answers
            .iter()
            .map(|a| {
                let vals = vars.iter().map(|v| a.get(v).cloned().unwrap_or(Term::atom("_"))).collect();
                (vals, render_with(&a.justification, JUSTIFY_DEPTH, &self.phrasebook))
            })
            .collect())
    }

    /// Unfilled slots, in the order they are asked for.
    pub fn missing_parameters(&self, state: &DialogState) -> Result<Vec<SlotName>, DialogError> {
        let program = self.program_for(state, None)?;
        self.missing_in(&program)
    }

    fn missing_in(&self, program: &Program) -> Result<Vec<SlotName>, DialogError> {
        let mut out = Vec::new();
        for (vals, _) in self.ask(program, "all_missing_parameter(L)", &["L"])? {
            if let Term::List(items) = &vals[0] {
                out.extend(items.iter().filter_map(|t| t.as_atom()?.parse::<SlotName>().ok()));
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    fn rank(&self, cuisine: &str) -> (usize, String) {
        let i = self.cuisine_rank.iter().position(|c| c == cuisine).unwrap_or(usize::MAX);
        (i, cuisine.to_string())
    }

    /// Cuisines the KB lets us suggest, best first.
    pub fn cuisine_suggestions(&self, state: &DialogState) -> Result<Vec<(String, String)>, DialogError> {
        let program = self.program_for(state, None)?;
        let mut out: Vec<(String, String)> = self
            .ask(&program, "cuisine_suggestion(user,C)", &["C"])?
            .into_iter()
            .map(|(v, j)| (term_text(&v[0]), j))
            .collect();
        out.sort_by_key(|(c, _)| self.rank(c));
        out.dedup_by(|a, b| a.0 == b.0);
        Ok(out)
    }

    pub fn suggest_cuisine(&self, state: &DialogState) -> Result<Option<String>, DialogError> {
        Ok(self.cuisine_suggestions(state)?.into_iter().next().map(|(c, _)| c))
    }

    /// Best-rated option for the issued call that was not rejected.
    pub fn present_option(&self, state: &DialogState) -> Result<(String, String), DialogError> {
        let program = self.program_for(state, None)?;
        let mut opts: Vec<(i64, String, String)> = self
            .ask(&program, "option(R,N)", &["R", "N"])?
            .into_iter()
            .map(|(v, j)| (v[1].as_int().unwrap_or(0), term_text(&v[0]), j))
            .filter(|(_, r, _)| !state.rejected_options.contains(r))
            .collect();
        opts.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
        opts.into_iter().next().map(|(_, r, j)| (r, j)).ok_or(DialogError::NoMoreOptions)
    }

    /// Phone number or address of the reserved restaurant.
    pub fn provide_info(&self, state: &DialogState, kind: &str) -> Result<(String, String), DialogError> {
        if !matches!(kind, "phone" | "address") {
            return Err(DialogError::UnknownInfoRequest(kind.to_string()));
        }
        let r = state
            .reserved
            .as_deref()
            .or(state.current_option.as_deref())
            .ok_or_else(|| DialogError::UnknownInfoRequest(kind.to_string()))?;
        let program = self.program_for(state, None)?;
        let found = self.ask(&program, &format!("info({r},{kind},V)"), &["V"])?;
        found
            .into_iter()
            .next()
            .map(|(v, j)| (term_text(&v[0]), j))
            .ok_or_else(|| DialogError::UnknownInfoRequest(format!("{kind} of {r}")))
    }

    fn read(&self, state: &DialogState, utterance: &str) -> Result<Reading, DialogError> {
        let program = self.program_for(state, Some(utterance))?;
        let ws = words(utterance);
        let mut reading = Reading::default();
        for (v, _) in self.ask(&program, "intent(I)", &["I"])? {
            match &v[0] {
                Term::Compound(f, args) if &**f == "book" => reading.books.push(term_text(&args[0])),
                Term::Compound(f, args) if &**f == "info" => {
                    reading.intents.insert(format!("info_{}", term_text(&args[0])));
                }
                t => {
                    reading.intents.insert(term_text(t));
                }
            }
        }
        for (v, j) in self.ask(&program, "slot_candidate(S,V)", &["S", "V"])? {
            let (Ok(slot), value) = (term_text(&v[0]).parse::<SlotName>(), term_text(&v[1])) else { continue };
            let pos = ws.iter().position(|w| *w == value).unwrap_or(0);
            reading.slots.push((slot, value, pos));
            reading.justification.push(j);
        }
        for (v, j) in self.ask(&program, "new_pref(P)", &["P"])? {
            reading.prefs.push(v[0].to_string());
            reading.justification.push(j);
        }
        Ok(reading)
    }

    /// Runs one turn and returns the response with the updated state.
    pub fn next_turn(&self, state: &DialogState, utterance: &str) -> Result<(String, DialogState), DialogError> {
        let mut next = state.clone();
        let outcome = self.step(&mut next, utterance)?;
        Ok((outcome.response, next))
    }

    /// Runs one turn in place.
    pub fn step(&self, state: &mut DialogState, utterance: &str) -> Result<TurnOutcome, DialogError> {
        let from = state.fsm;
        let reading = self.read(state, utterance)?;
        let mut justification = reading.justification.clone();
        let mut work = state.clone();
        let decision = self.decide(&mut work, &reading, &mut justification)?;
        if !from.can_move_to(decision.to) {
            return Err(DialogError::IllegalTransition { from, to: decision.to });
        }
        let args: Vec<(&str, &str)> = decision.args.iter().map(|(k, v)| (*k, v.as_str())).collect();
        let mut response = match decision.act {
            "api_call" => format_api_call(&work.slots)?,
            act => self.templates.render(act, &args)?,
        };
        if decision.act != "api_call" && utterance.chars().next().is_some_and(char::is_uppercase) {
            response = capitalize(&response);
        }
        let diagnostic = (decision.act == "clarify").then(|| DialogError::UnrecognizedUtterance(utterance.to_string()));
        if diagnostic.is_some() {
            // Not understood: only the history moves.
            work = state.clone();
        }
        work.fsm = decision.to;
        work.last_justification = justification.join("\n");
        work.history.push(Exchange { user: utterance.to_string(), agent: response.clone() });
        *state = work;
        Ok(TurnOutcome {
            response,
            act: decision.act.to_string(),
            from,
            to: decision.to,
            justification: state.last_justification.clone(),
            diagnostic,
        })
    }

    /// Records new preferences and slot values; returns whether anything changed.
    fn absorb(&self, state: &mut DialogState, reading: &Reading) -> bool {
        let mut changed = false;
        for p in &reading.prefs {
            if !state.preferences.contains(p) {
                state.preferences.push(p.clone());
            }
            changed = true;
        }
        for slot in SlotName::ALL {
            // The value mentioned last wins within one utterance.
            if let Some((_, v, _)) = reading.slots.iter().filter(|(s, _, _)| *s == slot).max_by_key(|(_, _, p)| *p) {
                let provenance = if slot == SlotName::Cuisine && state.suggestion.contains(v) {
                    Provenance::SuggestedAccepted
                } else {
                    Provenance::UserStated
                };
                state.slots.set(slot, v, provenance);
                changed = true;
            }
        }
        changed
    }

    fn ask_next(&self, state: &mut DialogState, justification: &mut Vec<String>) -> Result<Decision, DialogError> {
        let program = self.program_for(state, None)?;
        let missing = self.missing_in(&program)?;
        Ok(match missing.first() {
            Some(slot) => {
                if let Some((_, j)) =
                    self.ask(&program, &format!("missing_parameter({})", slot.name()), &[])?.into_iter().next()
                {
                    justification.push(j);
                }
                state.awaiting = Some(*slot);
                Decision::new(
                    match slot {
                        SlotName::Cuisine => "ask_cuisine",
                        SlotName::Location => "ask_location",
                        SlotName::PartySize => "ask_party_size",
                        SlotName::Price => "ask_price",
                    },
                    FsmState::CollectParams,
                )
            }
            None => {
                state.awaiting = None;
                Decision::new("searching", FsmState::ConfirmApiCall)
            }
        })
    }

    fn suggest(&self, state: &mut DialogState, justification: &mut Vec<String>) -> Result<Decision, DialogError> {
        let all = self.cuisine_suggestions(state)?;
        let narrowed = state.preferences.iter().any(|p| p.starts_with("wants_ingredient("));
        let picked: Vec<(String, String)> =
            if narrowed && all.len() >= 2 { all } else { all.into_iter().take(1).collect() };
        justification.extend(picked.iter().map(|(_, j)| j.clone()));
        state.suggestion = picked.iter().map(|(c, _)| c.clone()).collect();
        state.awaiting = Some(SlotName::Cuisine);
        Ok(match state.suggestion.as_slice() {
            [] => Decision::new("ask_cuisine", FsmState::CollectParams),
            [one] => Decision::new("suggest", FsmState::CollectParams).arg("cuisine", one.clone()),
            many => {
                let titled: Vec<String> = many.iter().map(|c| capitalize(c)).collect();
                let (last, rest) = titled.split_last().expect("non-empty");
                Decision::new("suggest_choice", FsmState::CollectParams)
                    .arg("choices", format!("{} or {last}", rest.join(", ")))
            }
        })
    }

    fn offer(&self, state: &mut DialogState, justification: &mut Vec<String>) -> Result<Decision, DialogError> {
        match self.present_option(state) {
            Ok((r, j)) => {
                justification.push(j);
                state.current_option = Some(r.clone());
                Ok(Decision::new("offer", FsmState::PresentOptions).arg("restaurant", r))
            }
            Err(DialogError::NoMoreOptions) => Ok(Decision::new("no_more_options", state.fsm)),
            Err(e) => Err(e),
        }
    }

    fn decide(
        &self,
        state: &mut DialogState,
        r: &Reading,
        justification: &mut Vec<String>,
    ) -> Result<Decision, DialogError> {
        use FsmState::*;
        let silence = r.has("silence");
        let clarify = |s: FsmState| Ok(Decision::new("clarify", s));
        match state.fsm {
            Greet | CollectParams => {
                if let Some(rest) = r.books.first() {
                    state.reserved = Some(rest.clone());
                    return Ok(Decision::new("reserve", ProvideExtraInfo));
                }
                if state.fsm == Greet && r.has("greet") && !r.has("request") && r.slots.is_empty() {
                    return Ok(Decision::new("greet", CollectParams));
                }
                let pending = std::mem::take(&mut state.suggestion);
                if !pending.is_empty() && state.slots.get(SlotName::Cuisine).is_none() {
                    if r.has("affirm") && pending.len() == 1 {
                        state.slots.set(SlotName::Cuisine, &pending[0], Provenance::SuggestedAccepted);
                        self.absorb(state, r);
                        return self.ask_next(state, justification);
                    }
                    if r.has("deny") && r.slots.iter().all(|(s, _, _)| *s != SlotName::Cuisine) {
                        for c in &pending {
                            let p = format!("rejected({c})");
                            if !state.preferences.contains(&p) {
                                state.preferences.push(p);
                            }
                        }
                        self.absorb(state, r);
                        return self.suggest(state, justification);
                    }
                }
                state.suggestion = pending;
                let changed = self.absorb(state, r);
                state.suggestion.clear();
                if !state.acknowledged && (r.has("request") || !r.slots.is_empty()) {
                    state.acknowledged = true;
                    return Ok(Decision::new("ack", CollectParams));
                }
                if !r.prefs.is_empty() && state.slots.get(SlotName::Cuisine).is_none() {
                    return self.suggest(state, justification);
                }
                if silence || changed {
                    return self.ask_next(state, justification);
                }
                clarify(state.fsm)
            }
            ConfirmApiCall => {
                if silence {
                    format_api_call(&state.slots)?;
                    state.issued_call =
                        Some(SlotName::ALL.iter().filter_map(|s| state.slots.value(*s).map(str::to_string)).collect());
                    state.current_option = None;
                    return Ok(Decision::new("api_call", AwaitUpdates));
                }
                if self.absorb(state, r) {
                    return Ok(Decision::new("update_more", AwaitUpdates));
                }
                clarify(ConfirmApiCall)
            }
            AwaitUpdates => {
                if r.has("thanks") {
                    return Ok(Decision::new("welcome", Close));
                }
                if !r.slots.is_empty() && self.absorb(state, r) {
                    return Ok(Decision::new("update_more", AwaitUpdates));
                }
                if r.has("deny") {
                    return Ok(Decision::new("searching", ConfirmApiCall));
                }
                if silence {
                    return self.offer(state, justification);
                }
                clarify(AwaitUpdates)
            }
            PresentOptions => {
                if r.has("accept") {
                    state.reserved = state.current_option.clone();
                    return Ok(Decision::new("reserve", ProvideExtraInfo));
                }
                if r.has("reject") {
                    if let Some(cur) = state.current_option.take() {
                        state.rejected_options.insert(cur);
                    }
                    return Ok(Decision::new("next_option", PresentOptions));
                }
                if silence {
                    return self.offer(state, justification);
                }
                clarify(PresentOptions)
            }
            ProvideExtraInfo => {
                for kind in ["phone", "address"] {
                    if r.has(&format!("info_{kind}")) {
                        return match self.provide_info(state, kind) {
                            Ok((v, j)) => {
                                justification.push(j);
                                Ok(Decision::new(if kind == "phone" { "phone" } else { "address" }, ProvideExtraInfo)
                                    .arg(kind, v))
                            }
                            Err(DialogError::UnknownInfoRequest(_)) => clarify(ProvideExtraInfo),
                            Err(e) => Err(e),
                        };
                    }
                }
                if r.has("deny") {
                    return Ok(Decision::new("welcome", Close));
                }
                if r.has("thanks") {
                    return Ok(Decision::new("anything_else", ProvideExtraInfo));
                }
                clarify(ProvideExtraInfo)
            }
            Close => {
                if r.has("thanks") || r.has("deny") {
                    return Ok(Decision::new("welcome", Close));
                }
                clarify(Close)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(agent: &DialogAgent, state: &mut DialogState, turns: &[(&str, &str)]) {
        for (user, expected) in turns {
            let out = agent.step(state, user).unwrap();
            assert_eq!(&out.response, expected, "after `{user}` in {:?}", out.from);
        }
    }

    #[test]
    fn cuisine_suggestion_transcript() {
        let agent = DialogAgent::default();
        let mut s = DialogState::new("t");
        run(
            &agent,
            &mut s,
            &[
                ("Good morning", "Hello what can i help you with today"),
                ("I'd like to reserve a table in London in a cheap price range", "I'm on it"),
                ("<SILENCE>", "any preference on a type of cuisine"),
                ("anything, except Lebanese food", "do you want to have Chinese food"),
                ("I want to have curry", "Do you like Indian or Thai"),
            ],
        );
        assert_eq!(s.slots.value(SlotName::Location), Some("london"));
        assert_eq!(s.slots.value(SlotName::Price), Some("cheap"));
        assert!(s.preferences.contains(&"excluded(lebanese)".to_string()));
        assert!(s.last_justification.contains("curry"), "{}", s.last_justification);
    }

    #[test]
    fn accepted_suggestion_has_provenance() {
        let agent = DialogAgent::default();
        let mut s = DialogState::new("t");
        run(
            &agent,
            &mut s,
            &[
                ("hi", "hello what can i help you with today"),
                ("may i have a table for four in paris", "i'm on it"),
                ("<SILENCE>", "any preference on a type of cuisine"),
                ("i had chinese food yesterday", "do you want to have Indian food"),
                ("no", "do you want to have Thai food"),
                ("yes", "which price range are looking for"),
            ],
        );
        assert_eq!(s.slots.cuisine.as_ref().unwrap().provenance, Provenance::SuggestedAccepted);
        assert_eq!(s.slots.value(SlotName::Cuisine), Some("thai"));
    }

    #[test]
    fn missing_parameters_in_order() {
        let agent = DialogAgent::default();
        let mut s = DialogState::new("t");
        assert_eq!(agent.missing_parameters(&s).unwrap(), SlotName::ALL.to_vec());
        s.slots.set(SlotName::Location, "rome", Provenance::UserStated);
        s.slots.set(SlotName::Cuisine, "thai", Provenance::UserStated);
        assert_eq!(agent.missing_parameters(&s).unwrap(), vec![SlotName::PartySize, SlotName::Price]);
    }

    #[test]
    fn api_call_format() {
        let mut slots = SlotTable::default();
        assert!(matches!(format_api_call(&slots), Err(DialogError::IncompleteSlots(m)) if m.len() == 4));
        for (s, v) in [
            (SlotName::Price, "cheap"),
            (SlotName::PartySize, "six"),
            (SlotName::Location, "paris"),
            (SlotName::Cuisine, "italian"),
        ] {
            slots.set(s, v, Provenance::UserStated);
        }
        assert_eq!(format_api_call(&slots).unwrap(), "api_call italian paris six cheap");
    }

    fn kb() -> Vec<(String, String, String)> {
        let mut rows = Vec::new();
        for (name, rating) in [("resto_a", 5), ("resto_b", 8), ("resto_c", 3)] {
            for (a, v) in [
                ("R_cuisine", "italian".to_string()),
                ("R_location", "paris".to_string()),
                ("R_price", "cheap".to_string()),
                ("R_rating", rating.to_string()),
                ("R_phone", format!("{name}_phone")),
                ("R_address", format!("{name}_address")),
            ] {
                rows.push((name.to_string(), a.to_string(), v));
            }
        }
        rows
    }

    #[test]
    fn options_by_rating_then_extra_info() {
        let agent = DialogAgent::default();
        let mut s = DialogState::new("t").with_kb(kb());
        run(
            &agent,
            &mut s,
            &[
                ("hello", "hello what can i help you with today"),
                ("can you book a table for six people with italian food", "i'm on it"),
                ("<SILENCE>", "where should it be"),
                ("paris please", "which price range are looking for"),
                ("in a cheap price range please", "ok let me look into some options for you"),
                ("<SILENCE>", "api_call italian paris six cheap"),
                ("<SILENCE>", "what do you think of this option: resto_b"),
                ("no this does not work for me", "sure let me find an other option for you"),
                ("<SILENCE>", "what do you think of this option: resto_a"),
                ("do you have something else", "sure let me find an other option for you"),
                ("<SILENCE>", "what do you think of this option: resto_c"),
                ("let's do it", "great let me do the reservation"),
                ("may i have the address of the restaurant", "here it is resto_c_address"),
                ("thanks", "is there anything i can help you with"),
                ("no thank you", "you're welcome"),
            ],
        );
        assert_eq!(s.fsm, FsmState::Close);
    }

    #[test]
    fn refinement_and_booking_by_name() {
        let agent = DialogAgent::default();
        let mut s = DialogState::new("t");
        run(
            &agent,
            &mut s,
            &[
                ("hi", "hello what can i help you with today"),
                ("i'd like to book a table with french food for two in rome in a moderate price range", "i'm on it"),
                ("<SILENCE>", "ok let me look into some options for you"),
                ("<SILENCE>", "api_call french rome two moderate"),
                ("actually i would prefer in madrid", "sure is there anything else to update"),
                ("no", "ok let me look into some options for you"),
                ("<SILENCE>", "api_call french madrid two moderate"),
                ("thank you", "you're welcome"),
            ],
        );
        let mut s = DialogState::new("u").with_kb(kb());
        run(
            &agent,
            &mut s,
            &[
                ("hi", "hello what can i help you with today"),
                ("can you book a table at resto_a", "great let me do the reservation"),
                ("what is the phone number of the restaurant", "here it is resto_a_phone"),
            ],
        );
        assert!(matches!(agent.provide_info(&s, "hours"), Err(DialogError::UnknownInfoRequest(_))));
    }

    #[test]
    fn unknown_entities_from_context() {
        let agent = DialogAgent::default();
        let mut s = DialogState::new("t");
        run(
            &agent,
            &mut s,
            &[
                ("hi", "hello what can i help you with today"),
                ("i'd like to book a table in hanoi with ethiopian food", "i'm on it"),
                ("<SILENCE>", "how many people would be in your party"),
                ("we will be four", "which price range are looking for"),
            ],
        );
        assert_eq!(s.slots.value(SlotName::Location), Some("hanoi"));
        assert_eq!(s.slots.value(SlotName::Cuisine), Some("ethiopian"));
    }

    #[test]
    fn unrecognized_keeps_state() {
        let agent = DialogAgent::default();
        let mut s = DialogState::new("t");
        agent.step(&mut s, "hi").unwrap();
        let before = s.clone();
        let out = agent.step(&mut s, "blorp").unwrap();
        assert_eq!(out.response, "sorry i did not understand that");
        assert!(matches!(out.diagnostic, Some(DialogError::UnrecognizedUtterance(_))));
        assert_eq!(s.fsm, before.fsm);
        assert_eq!(s.slots, before.slots);
        assert_eq!(s.history.len(), 2);
    }
}
