use serde_json::{Map, Value};

use super::{Dfao, Letter};
use crate::error::{Error, Result};

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidAutomaton(msg.into())
}

/// Reads a JSON scalar (string or number) as text.
pub(crate) fn scalar(v: &Value, field: &str) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        _ => Err(invalid(format!("field {field:?}: expected a string or a number"))),
    }
}

pub(crate) fn field<'a>(obj: &'a Map<String, Value>, name: &str) -> Result<&'a Value> {
    obj.get(name).ok_or_else(|| invalid(format!("missing field {name:?}")))
}

pub(crate) fn string_list(v: &Value, name: &str) -> Result<Vec<String>> {
    v.as_array()
        .ok_or_else(|| invalid(format!("field {name:?}: expected an array")))?
        .iter()
        .map(|x| scalar(x, name))
        .collect()
}

pub(crate) fn digit_list(v: &Value, name: &str) -> Result<Vec<u32>> {
    v.as_array()
        .ok_or_else(|| invalid(format!("field {name:?}: expected an array")))?
        .iter()
        .map(|x| {
            x.as_u64()
                .and_then(|d| u32::try_from(d).ok())
                .ok_or_else(|| invalid(format!("field {name:?}: {x} is not a digit")))
        })
        .collect()
}

pub(crate) fn state_index(names: &[String], name: &str, field: &str) -> Result<usize> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| invalid(format!("field {field:?}: unknown state {name:?}")))
}

/// Splits a `"state,digit"` transition key.
pub(crate) fn transition_key(key: &str) -> Result<(&str, u32)> {
    let (s, d) = key
        .rsplit_once(',')
        .ok_or_else(|| invalid(format!("field \"delta\": key {key:?} is not of the form state,digit")))?;
    let d = d
        .trim()
        .parse()
        .map_err(|_| invalid(format!("field \"delta\": bad digit in key {key:?}")))?;
    Ok((s.trim(), d))
}

impl Dfao {
    /// Parses the JSON document format
    /// `{"states", "initial", "alphabet", "delta": {"s,d": "t"}, "output": {"s": "b"}}`.
    pub fn from_json(text: &str) -> Result<Dfao> {
        let doc: Value = serde_json::from_str(text).map_err(|e| invalid(format!("malformed JSON: {e}")))?;
        let obj = doc.as_object().ok_or_else(|| invalid("expected a JSON object"))?;
        let names = string_list(field(obj, "states")?, "states")?;
        let initial = state_index(&names, &scalar(field(obj, "initial")?, "initial")?, "initial")?;
        let alphabet = digit_list(field(obj, "alphabet")?, "alphabet")?;
        let delta = field(obj, "delta")?
            .as_object()
            .ok_or_else(|| invalid("field \"delta\": expected an object"))?;
        let output = field(obj, "output")?
            .as_object()
            .ok_or_else(|| invalid("field \"output\": expected an object"))?;

        let mut rows = vec![vec![usize::MAX; alphabet.len()]; names.len()];
        for (key, target) in delta {
            let (s, d) = transition_key(key)?;
            let s = state_index(&names, s, "delta")?;
            let col = alphabet
                .iter()
                .position(|&a| a == d)
                .ok_or_else(|| invalid(format!("field \"delta\": digit {d} not in alphabet")))?;
            rows[s][col] = state_index(&names, &scalar(target, "delta")?, "delta")?;
        }
        for (s, row) in rows.iter().enumerate() {
            if let Some(col) = row.iter().position(|&t| t == usize::MAX) {
                return Err(invalid(format!(
                    "field \"delta\": missing transition from {:?} on {}",
                    names[s], alphabet[col]
                )));
            }
        }
        let mut outputs = vec![None; names.len()];
        for (key, letter) in output {
            let s = state_index(&names, key, "output")?;
            let letter: Letter = scalar(letter, "output")?
                .parse()
                .map_err(|_| invalid(format!("field \"output\": bad letter for {key:?}")))?;
            outputs[s] = Some(letter);
        }
        let outputs = outputs
            .into_iter()
            .enumerate()
            .map(|(s, o)| o.ok_or_else(|| invalid(format!("field \"output\": missing state {:?}", names[s]))))
            .collect::<Result<Vec<_>>>()?;
        Dfao::new(names, initial, alphabet, rows, outputs)
    }

    pub fn to_json(&self) -> String {
        let mut delta = Map::new();
        let mut output = Map::new();
        for s in 0..self.num_states() {
            for (&a, &t) in self.alphabet().iter().zip(self.row(s)) {
                delta.insert(format!("{},{a}", self.name(s)), Value::String(self.name(t).into()));
            }
            output.insert(self.name(s).into(), Value::String(self.output(s).to_string()));
        }
        let doc = serde_json::json!({
            "states": self.names(),
            "initial": self.name(self.initial()),
            "alphabet": self.alphabet(),
            "delta": delta,
            "output": output,
        });
        serde_json::to_string_pretty(&doc).expect("JSON values serialize")
    }

    /// Graphviz rendering with `name|output` node labels and merged edge labels.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph dfao {\n  rankdir=LR;\n  node [shape=circle];\n  start [shape=point];\n");
        for s in 0..self.num_states() {
            out.push_str(&format!(
                "  s{s} [label=\"{}|{}\"];\n",
                escape(self.name(s)),
                self.output(s)
            ));
        }
        out.push_str(&format!("  start -> s{};\n", self.initial()));
        for s in 0..self.num_states() {
            let mut targets: Vec<(usize, Vec<u32>)> = Vec::new();
            for (&a, &t) in self.alphabet().iter().zip(self.row(s)) {
                match targets.iter_mut().find(|(x, _)| *x == t) {
                    Some((_, labels)) => labels.push(a),
                    None => targets.push((t, vec![a])),
                }
            }
            for (t, labels) in targets {
                let labels: Vec<String> = labels.iter().map(u32::to_string).collect();
                out.push_str(&format!("  s{s} -> s{t} [label=\"{}\"];\n", labels.join(",")));
            }
        }
        out.push_str("}\n");
        out
    }
}

pub(crate) fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}
