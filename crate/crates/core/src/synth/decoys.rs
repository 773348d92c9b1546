//! Text files that are not configuration of any trained application, plus a
//! few files the filters must skip (binaries, excluded extensions, oversize).

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

const WORDS: &[&str] = &[
    "the", "server", "package", "install", "module", "request", "value", "option", "user", "data", "file", "system",
    "default", "support", "build", "release", "version", "network", "client", "cache", "thread", "memory", "report",
    "update", "license", "copy", "source", "binary", "path", "library",
];

const PACKAGES: &[&str] = &[
    "openssl",
    "zlib",
    "curl",
    "bash",
    "coreutils",
    "tzdata",
    "libxml2",
    "pcre",
    "ncurses",
    "gzip",
    "python3",
    "perl",
    "procps",
    "util-linux",
    "findutils",
    "sed",
    "grep",
    "tar",
    "ca-certificates",
    "expat",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoyKind {
    /// Text a labeler has to look at and reject.
    Text,
    /// Skipped by the filters before any keyword comparison.
    Filtered,
}

pub struct Decoy {
    pub path: String,
    pub content: Vec<u8>,
    pub kind: DecoyKind,
}

fn word(rng: &mut ChaCha8Rng) -> &'static str {
    WORDS[rng.random_range(0..WORDS.len())]
}

fn package(rng: &mut ChaCha8Rng) -> &'static str {
    PACKAGES[rng.random_range(0..PACKAGES.len())]
}

fn sentence(rng: &mut ChaCha8Rng) -> String {
    let n = rng.random_range(5..14);
    let mut words: Vec<&str> = (0..n).map(|_| word(rng)).collect();
    let mut first = words[0].to_string();
    first[..1].make_ascii_uppercase();
    words[0] = &first;
    format!("{}.", words.join(" "))
}

fn prose(rng: &mut ChaCha8Rng) -> String {
    let mut out = String::new();
    for _ in 0..rng.random_range(2..6) {
        for _ in 0..rng.random_range(1..5) {
            out.push_str(&sentence(rng));
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

fn shell(rng: &mut ChaCha8Rng) -> String {
    let name = package(rng);
    format!(
        "#!/bin/sh\nset -e\n\nNAME={name}\nPIDFILE=/var/run/$NAME.pid\n\ncase \"$1\" in\n  start)\n    echo \"Starting $NAME\"\n    exec /usr/sbin/$NAME --{w}\n    ;;\n  stop)\n    kill $(cat $PIDFILE)\n    ;;\n  *)\n    echo \"Usage: $0 {{start|stop}}\" >&2\n    exit 1\n    ;;\nesac\n",
        w = word(rng)
    )
}

fn yaml(rng: &mut ChaCha8Rng) -> String {
    let mut out = format!("version: {}\nservices:\n", rng.random_range(2..4));
    for _ in 0..rng.random_range(1..4) {
        let svc = package(rng);
        out.push_str(&format!(
            "  {svc}:\n    image: {svc}:latest\n    restart: always\n    environment:\n      - {}={}\n",
            word(rng).to_uppercase(),
            rng.random_range(1..100)
        ));
    }
    out
}

fn csv(rng: &mut ChaCha8Rng) -> String {
    let mut out = String::from("id,name,count,ratio\n");
    for i in 0..rng.random_range(5..40) {
        out.push_str(&format!(
            "{i},{},{},{:.3}\n",
            word(rng),
            rng.random_range(0..1000),
            rng.random::<f64>()
        ));
    }
    out
}

fn log_lines(rng: &mut ChaCha8Rng, lines: usize) -> String {
    let mut out = String::new();
    for i in 0..lines {
        out.push_str(&format!(
            "2023-0{}-{:02}T{:02}:{:02}:{:02}Z INFO [{}] {} {}\n",
            1 + i % 9,
            1 + rng.random_range(0..28),
            rng.random_range(0..24),
            rng.random_range(0..60),
            rng.random_range(0..60),
            package(rng),
            word(rng),
            sentence(rng)
        ));
    }
    out
}

fn python(rng: &mut ChaCha8Rng) -> String {
    format!(
        "import os\nimport sys\n\n\ndef {w}(path):\n    with open(path) as fh:\n        return fh.read()\n\n\nif __name__ == \"__main__\":\n    print({w}(sys.argv[1]))\n",
        w = word(rng)
    )
}

fn json(rng: &mut ChaCha8Rng) -> String {
    format!(
        "{{\n  \"name\": \"{}\",\n  \"version\": \"{}.{}.{}\",\n  \"private\": true,\n  \"scripts\": {{ \"start\": \"node index\" }}\n}}\n",
        package(rng),
        rng.random_range(0..5),
        rng.random_range(0..20),
        rng.random_range(0..10)
    )
}

fn systemd_unit(rng: &mut ChaCha8Rng) -> String {
    let name = package(rng);
    format!(
        "[Unit]\nDescription={name} service\nAfter=network.target\n\n[Service]\nType=simple\nExecStart=/usr/bin/{name}\nRestart=on-failure\n\n[Install]\nWantedBy=multi-user.target\n"
    )
}

fn sshd_config(rng: &mut ChaCha8Rng) -> String {
    let port = if rng.random_bool(0.8) { 22 } else { 2222 };
    format!(
        "# sshd configuration\nPort {port}\nAddressFamily any\nListenAddress 0.0.0.0\nHostKey /etc/ssh/ssh_host_rsa_key\nPermitRootLogin no\nPubkeyAuthentication yes\nPasswordAuthentication no\nChallengeResponseAuthentication no\nUsePAM yes\nX11Forwarding no\nPrintMotd no\nAcceptEnv LANG LC_*\nSubsystem sftp /usr/lib/openssh/sftp-server\n"
    )
}

fn redis_conf(rng: &mut ChaCha8Rng) -> String {
    format!(
        "bind 127.0.0.1\nprotected-mode yes\nport {}\ntcp-backlog 511\ntimeout 0\ntcp-keepalive 300\ndaemonize no\nsupervised no\npidfile /var/run/redis_6379.pid\nloglevel notice\nlogfile \"\"\ndatabases 16\nsave 900 1\nsave 300 10\ndir /data\nmaxmemory {}mb\nappendonly no\n",
        if rng.random_bool(0.9) { 6379 } else { 6380 },
        rng.random_range(64..1024)
    )
}

fn php_like(rng: &mut ChaCha8Rng) -> String {
    format!(
        "[PHP]\nengine = On\nshort_open_tag = Off\nprecision = 14\noutput_buffering = 4096\nmemory_limit = {}M\nerror_reporting = E_ALL\ndisplay_errors = Off\n\n[Date]\ndate.timezone = UTC\n",
        [128, 256, 512][rng.random_range(0..3)]
    )
}

fn makefile(rng: &mut ChaCha8Rng) -> String {
    let target = package(rng);
    format!("CC=gcc\nCFLAGS=-O2 -Wall\n\nall: {target}\n\n{target}: main.o\n\t$(CC) -o $@ $^\n\nclean:\n\trm -f *.o {target}\n")
}

fn crontab(rng: &mut ChaCha8Rng) -> String {
    format!(
        "SHELL=/bin/sh\nPATH=/usr/local/sbin:/usr/local/bin:/sbin:/bin:/usr/sbin:/usr/bin\n\n{} * * * * root cd / && run-parts --report /etc/cron.hourly\n",
        rng.random_range(0..60)
    )
}

type TextGen = fn(&mut ChaCha8Rng) -> String;

/// (directory template, file name stem, extension, generator). `{p}` is a package name.
const TEXT_KINDS: &[(&str, &str, &str, TextGen)] = &[
    ("/usr/share/doc/{p}", "README", "", prose),
    ("/usr/share/doc/{p}", "copyright", "", prose),
    ("/usr/share/doc/{p}", "NEWS", ".txt", prose),
    ("/etc/init.d", "{p}", "", shell),
    ("/usr/local/bin", "{p}-entry", ".sh", shell),
    ("/srv/{p}", "docker-compose", ".yml", yaml),
    ("/var/lib/{p}", "stats", ".csv", csv),
    ("/var/log/{p}", "current", ".log", |r| log_lines(r, 20)),
    ("/usr/lib/python3/{p}", "util", ".py", python),
    ("/opt/{p}", "package", ".json", json),
    ("/etc/systemd/system", "{p}", ".service", systemd_unit),
    ("/etc/ssh", "sshd_config", "", sshd_config),
    ("/etc/redis", "redis", ".conf", redis_conf),
    ("/usr/local/etc/php", "php", ".ini", php_like),
    ("/usr/src/{p}", "Makefile", "", makefile),
    ("/etc/cron.d", "{p}", "", crontab),
];

fn unique_path(taken: &mut BTreeSet<String>, rng: &mut ChaCha8Rng, dir: &str, stem: &str, ext: &str) -> String {
    let pkg = package(rng);
    let dir = dir.replace("{p}", pkg);
    let stem = stem.replace("{p}", pkg);
    let mut path = format!("{dir}/{stem}{ext}");
    let mut n = 1;
    while !taken.insert(path.clone()) {
        n += 1;
        path = format!("{dir}/{stem}-{n}{ext}");
    }
    path
}

/// `text` keyword-bearing decoys plus `filtered` ones the filters must drop.
pub fn decoys(rng: &mut ChaCha8Rng, taken: &mut BTreeSet<String>, text: usize, filtered: usize) -> Vec<Decoy> {
    let mut out = Vec::with_capacity(text + filtered);
    for _ in 0..text {
        let (dir, stem, ext, gen) = TEXT_KINDS[rng.random_range(0..TEXT_KINDS.len())];
        let path = unique_path(taken, rng, dir, stem, ext);
        out.push(Decoy {
            path,
            content: gen(rng).into_bytes(),
            kind: DecoyKind::Text,
        });
    }
    for i in 0..filtered {
        let (path, content) = match i % 3 {
            0 => {
                let path = unique_path(taken, rng, "/usr/bin", "{p}", "");
                let mut bytes = b"\x7fELF\x02\x01\x01\0\0\0\0\0\0\0\0\0".to_vec();
                bytes.extend((0..512).map(|_| rng.random::<u8>()));
                (path, bytes)
            }
            1 => {
                // a header file that happens to look like httpd configuration
                let path = unique_path(taken, rng, "/usr/include/{p}", "config", ".h");
                (path, b"Listen 80\nServerRoot /usr\n#define CONFIG 1\n".to_vec())
            }
            _ => {
                let path = unique_path(taken, rng, "/var/log/{p}", "archive", ".log");
                let mut text = log_lines(rng, 50);
                while text.len() <= crate::defaults::SIZE_CAP as usize {
                    text = text.repeat(2);
                }
                (path, text.into_bytes())
            }
        };
        out.push(Decoy {
            path,
            content,
            kind: DecoyKind::Filtered,
        });
    }
    out
}

/// System files every instance carries; text, never configuration of a
/// trained application.
pub fn system_files(rng: &mut ChaCha8Rng, host: &str) -> Vec<(String, String)> {
    let uid = rng.random_range(1000..1010);
    vec![
        (
            "/etc/os-release".into(),
            "NAME=\"Debian GNU/Linux\"\nVERSION_ID=\"12\"\nID=debian\nHOME_URL=\"https://www.debian.org/\"\n".into(),
        ),
        ("/etc/hostname".into(), format!("{host}\n")),
        (
            "/etc/hosts".into(),
            format!("127.0.0.1\tlocalhost\n::1\tlocalhost ip6-localhost\n172.17.0.2\t{host}\n"),
        ),
        (
            "/etc/passwd".into(),
            format!(
                "root:x:0:0:root:/root:/bin/bash\ndaemon:x:1:1:daemon:/usr/sbin:/usr/sbin/nologin\nwww-data:x:33:33:www-data:/var/www:/usr/sbin/nologin\nmysql:x:999:999::/var/lib/mysql:/bin/false\ndeploy:x:{uid}:{uid}::/home/deploy:/bin/sh\n"
            ),
        ),
        (
            "/etc/group".into(),
            format!("root:x:0:\ndaemon:x:1:\nwww-data:x:33:\nmysql:x:999:\ndeploy:x:{uid}:deploy\n"),
        ),
    ]
}
