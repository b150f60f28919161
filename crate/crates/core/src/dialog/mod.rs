//! Slot-filling restaurant reservation agent driven by a finite state
//! machine. Utterances are compiled to facts and every decision that needs
//! understanding (slot values, intents, missing parameters, cuisine
//! suggestions, options) is an engine query over those facts and the
//! dialog KB.

mod agent;
mod templates;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::EngineError;

pub use agent::{format_api_call, DialogAgent, TurnOutcome};
pub use templates::Templates;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DialogError {
    #[error("utterance not understood: `{0}`")]
    UnrecognizedUtterance(String),
    #[error("missing slots: {}", .0.join(", "))]
    IncompleteSlots(Vec<String>),
    #[error("no more options")]
    NoMoreOptions,
    #[error("unknown information request `{0}`")]
    UnknownInfoRequest(String),
    #[error("illegal transition {from} -> {to}")]
    IllegalTransition { from: FsmState, to: FsmState },
    #[error("{what} line {line}: {msg}")]
    Format { what: &'static str, line: usize, msg: String },
    #[error("no template for `{0}`")]
    MissingTemplate(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FsmState {
    Greet,
    CollectParams,
    ConfirmApiCall,
    AwaitUpdates,
    PresentOptions,
    ProvideExtraInfo,
    Close,
}

impl FsmState {
    pub fn name(self) -> &'static str {
        match self {
            FsmState::Greet => "greet",
            FsmState::CollectParams => "collect_params",
            FsmState::ConfirmApiCall => "confirm_api_call",
            FsmState::AwaitUpdates => "await_updates",
            FsmState::PresentOptions => "present_options",
            FsmState::ProvideExtraInfo => "provide_extra_info",
            FsmState::Close => "close",
        }
    }

    /// Whether `self -> to` is an edge of the machine. Staying put is
    /// always allowed (an utterance that was not understood).
    pub fn can_move_to(self, to: FsmState) -> bool {
        use FsmState::*;
        self == to
            || matches!(
                (self, to),
                (Greet, CollectParams)
                    | (CollectParams, ConfirmApiCall | ProvideExtraInfo)
                    | (ConfirmApiCall, AwaitUpdates | PresentOptions)
                    | (AwaitUpdates, ConfirmApiCall | PresentOptions | Close)
                    | (PresentOptions, ProvideExtraInfo)
                    | (ProvideExtraInfo, Close)
            )
    }
}

impl fmt::Display for FsmState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotName {
    Cuisine,
    Location,
    PartySize,
    Price,
}

impl SlotName {
    /// Declaration order, which is also the order slots are asked for.
    pub const ALL: [SlotName; 4] = [SlotName::Cuisine, SlotName::Location, SlotName::PartySize, SlotName::Price];

    pub fn name(self) -> &'static str {
        match self {
            SlotName::Cuisine => "cuisine",
            SlotName::Location => "location",
            SlotName::PartySize => "party_size",
            SlotName::Price => "price",
        }
    }
}

impl fmt::Display for SlotName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SlotName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        SlotName::ALL.into_iter().find(|n| n.name() == s).ok_or_else(|| format!("unknown slot `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    UserStated,
    SuggestedAccepted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotValue {
    pub value: String,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotTable {
    pub cuisine: Option<SlotValue>,
    pub location: Option<SlotValue>,
    pub party_size: Option<SlotValue>,
    pub price: Option<SlotValue>,
}

impl SlotTable {
    pub fn get(&self, slot: SlotName) -> Option<&SlotValue> {
        match slot {
            SlotName::Cuisine => self.cuisine.as_ref(),
            SlotName::Location => self.location.as_ref(),
            SlotName::PartySize => self.party_size.as_ref(),
            SlotName::Price => self.price.as_ref(),
        }
    }

    fn slot_mut(&mut self, slot: SlotName) -> &mut Option<SlotValue> {
        match slot {
            SlotName::Cuisine => &mut self.cuisine,
            SlotName::Location => &mut self.location,
            SlotName::PartySize => &mut self.party_size,
            SlotName::Price => &mut self.price,
        }
    }

    pub fn set(&mut self, slot: SlotName, value: &str, provenance: Provenance) {
        *self.slot_mut(slot) = Some(SlotValue { value: value.to_string(), provenance });
    }

    pub fn value(&self, slot: SlotName) -> Option<&str> {
        self.get(slot).map(|v| v.value.as_str())
    }

    pub fn filled(&self) -> impl Iterator<Item = (SlotName, &str)> + '_ {
        SlotName::ALL.into_iter().filter_map(|s| self.value(s).map(|v| (s, v)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exchange {
    pub user: String,
    pub agent: String,
}

/// Everything the agent remembers about one conversation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DialogState {
    pub session_id: String,
    pub fsm: FsmState,
    pub slots: SlotTable,
    pub history: Vec<Exchange>,
    /// `(restaurant, attribute, value)` rows.
    pub kb_facts: Vec<(String, String, String)>,
    pub rejected_options: BTreeSet<String>,
    /// Remembered preferences as fact text, e.g. `excluded(lebanese)`.
    pub preferences: Vec<String>,
    pub acknowledged: bool,
    pub awaiting: Option<SlotName>,
    /// Cuisines offered in the last turn.
    pub suggestion: Vec<String>,
    pub current_option: Option<String>,
    pub reserved: Option<String>,
    /// Slot values of the last api_call, in slot order.
    pub issued_call: Option<Vec<String>>,
    pub last_justification: String,
}

impl DialogState {
    pub fn new(session_id: impl Into<String>) -> Self {
        DialogState {
            session_id: session_id.into(),
            fsm: FsmState::Greet,
            slots: SlotTable::default(),
            history: Vec::new(),
            kb_facts: Vec::new(),
            rejected_options: BTreeSet::new(),
            preferences: Vec::new(),
            acknowledged: false,
            awaiting: None,
            suggestion: Vec::new(),
            current_option: None,
            reserved: None,
            issued_call: None,
            last_justification: String::new(),
        }
    }

    pub fn with_kb(mut self, kb_facts: Vec<(String, String, String)>) -> Self {
        self.kb_facts = kb_facts;
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Parses `<id> <restaurant> <attribute> <value>` lines (the id is optional).
pub fn parse_kb_facts(text: &str) -> Result<Vec<(String, String, String)>, DialogError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let cols: Vec<&str> = line.split_whitespace().collect();
        match cols[..] {
            [] => {}
            [_, r, a, v] | [r, a, v] => out.push((r.to_string(), a.to_string(), v.to_string())),
            _ => {
                return Err(DialogError::Format {
                    what: "restaurant table",
                    line: i + 1,
                    msg: format!("expected `<restaurant> <attribute> <value>`, found `{line}`"),
                })
            }
        }
    }
    Ok(out)
}
