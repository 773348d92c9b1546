//! Users, groups, environment variables and file ownership of an instance,
//! expressed as records alongside the application configuration.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::InstanceSnapshot;
use crate::disambiguate::{escape_segment, ConfigRecord};
use crate::parsers::{parse_colon_table, ConfigNode, GROUP_SCHEMA, PASSWD_SCHEMA};

pub const PASSWD_PATH: &str = "/etc/passwd";
pub const GROUP_PATH: &str = "/etc/group";
/// Optional JSON document standing in for runtime inspection output.
pub const MANIFEST_PATH: &str = "/.confex/manifest";

pub const PASSWD_APP: &str = "sys.passwd";
pub const GROUP_APP: &str = "sys.group";
pub const ENV_APP: &str = "sys.env";
pub const NET_APP: &str = "sys.net";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserRow {
    pub name: String,
    pub password: String,
    pub uid: u32,
    pub gid: u32,
    pub gecos: String,
    pub home: String,
    pub shell: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupRow {
    pub name: String,
    pub password: String,
    pub gid: u32,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileMeta {
    pub mode_bits: u32,
    pub owner_uid: u32,
    pub owner_gid: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnvironmentProfile {
    pub users: Vec<UserRow>,
    pub groups: Vec<GroupRow>,
    pub env_vars: BTreeMap<String, String>,
    pub file_meta: BTreeMap<String, FileMeta>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub addresses: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ports: Vec<u16>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Deserialize, Default)]
struct Manifest {
    #[serde(default)]
    env: BTreeMap<String, String>,
    #[serde(default)]
    addresses: Vec<String>,
    #[serde(default)]
    ports: Vec<u16>,
}

fn field<'a>(row: &'a ConfigNode, name: &str) -> &'a str {
    row.children
        .iter()
        .find(|c| c.key == name)
        .and_then(|c| c.value.as_deref())
        .unwrap_or("")
}

fn table_rows(snapshot: &InstanceSnapshot, path: &str, schema: &[&str], warnings: &mut Vec<String>) -> Vec<ConfigNode> {
    let Some(text) = snapshot.entry(path).and_then(|e| e.text()) else {
        warnings.push(format!("{path}: not present"));
        return Vec::new();
    };
    match parse_colon_table(&text, schema) {
        Ok(tree) => tree.root.children,
        Err(err) => {
            warnings.push(format!("{path}: {err}"));
            Vec::new()
        }
    }
}

fn parse_id(path: &str, row: &ConfigNode, column: &str, warnings: &mut Vec<String>) -> Option<u32> {
    let raw = field(row, column);
    let id = raw.parse().ok();
    if id.is_none() {
        warnings.push(format!(
            "{path}: `{}` has non-numeric {column} `{raw}`, row skipped",
            row.key
        ));
    }
    id
}

pub fn collect_environment(snapshot: &InstanceSnapshot) -> EnvironmentProfile {
    let mut warnings = Vec::new();

    let users = table_rows(snapshot, PASSWD_PATH, PASSWD_SCHEMA, &mut warnings)
        .iter()
        .filter_map(|row| {
            Some(UserRow {
                name: field(row, "name").to_string(),
                password: field(row, "password").to_string(),
                uid: parse_id(PASSWD_PATH, row, "uid", &mut warnings)?,
                gid: parse_id(PASSWD_PATH, row, "gid", &mut warnings)?,
                gecos: field(row, "gecos").to_string(),
                home: field(row, "home").to_string(),
                shell: field(row, "shell").to_string(),
            })
        })
        .collect();

    let groups = table_rows(snapshot, GROUP_PATH, GROUP_SCHEMA, &mut warnings)
        .iter()
        .filter_map(|row| {
            Some(GroupRow {
                name: field(row, "name").to_string(),
                password: field(row, "password").to_string(),
                gid: parse_id(GROUP_PATH, row, "gid", &mut warnings)?,
                members: field(row, "members")
                    .split(',')
                    .filter(|m| !m.is_empty())
                    .map(str::to_string)
                    .collect(),
            })
        })
        .collect();

    let manifest = match snapshot.entry(MANIFEST_PATH).and_then(|e| e.text()) {
        Some(text) => serde_json::from_str::<Manifest>(&text).unwrap_or_else(|e| {
            warnings.push(format!("{MANIFEST_PATH}: {e}"));
            Manifest::default()
        }),
        None => Manifest::default(),
    };

    let file_meta = snapshot
        .entries()
        .map(|e| {
            (
                e.path.clone(),
                FileMeta {
                    mode_bits: e.mode_bits,
                    owner_uid: e.owner_uid,
                    owner_gid: e.owner_gid,
                },
            )
        })
        .collect();

    for w in &warnings {
        log::warn!("{}: {w}", snapshot.instance_id());
    }
    EnvironmentProfile {
        users,
        groups,
        env_vars: manifest.env,
        file_meta,
        addresses: manifest.addresses,
        ports: manifest.ports,
        warnings,
    }
}

struct FileRecords<'a> {
    application: &'a str,
    file_path: &'a str,
    out: Vec<ConfigRecord>,
}

impl<'a> FileRecords<'a> {
    fn new(application: &'a str, file_path: &'a str) -> Self {
        Self {
            application,
            file_path,
            out: Vec::new(),
        }
    }

    fn push(&mut self, application: Option<&str>, key: String, value: String) {
        self.out.push(ConfigRecord {
            application: application.unwrap_or(self.application).to_string(),
            file_path: self.file_path.to_string(),
            key,
            value,
            entry_ordinal: self.out.len() + 1,
        });
    }
}

/// Records under the `sys.*` pseudo-applications, ordinals dense per source file.
pub fn env_to_records(profile: &EnvironmentProfile) -> Vec<ConfigRecord> {
    let mut passwd = FileRecords::new(PASSWD_APP, PASSWD_PATH);
    for u in &profile.users {
        let base = format!("passwd/{}", escape_segment(&u.name));
        let values = [
            u.name.clone(),
            u.password.clone(),
            u.uid.to_string(),
            u.gid.to_string(),
            u.gecos.clone(),
            u.home.clone(),
            u.shell.clone(),
        ];
        for (column, value) in PASSWD_SCHEMA.iter().zip(values) {
            passwd.push(None, format!("{base}/{column}"), value);
        }
    }

    let mut group = FileRecords::new(GROUP_APP, GROUP_PATH);
    for g in &profile.groups {
        let base = format!("group/{}", escape_segment(&g.name));
        let values = [
            g.name.clone(),
            g.password.clone(),
            g.gid.to_string(),
            g.members.join(","),
        ];
        for (column, value) in GROUP_SCHEMA.iter().zip(values) {
            group.push(None, format!("{base}/{column}"), value);
        }
    }

    let mut manifest = FileRecords::new(ENV_APP, MANIFEST_PATH);
    for (name, value) in &profile.env_vars {
        manifest.push(None, format!("env/{}", escape_segment(name)), value.clone());
    }
    for a in &profile.addresses {
        manifest.push(Some(NET_APP), "net/address".into(), a.clone());
    }
    for p in &profile.ports {
        manifest.push(Some(NET_APP), "net/port".into(), p.to_string());
    }

    let mut out = passwd.out;
    out.extend(group.out);
    out.extend(manifest.out);
    out
}
