//! Configuration file families for the applications the generator plants.
//! Within a family every file shares the same core keywords and adds at most
//! one optional directive, so same-family files are near-duplicates in
//! keyword space while their values vary.

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::doc::Doc;

pub struct Ctx<'a> {
    pub rng: &'a mut ChaCha8Rng,
    pub host: String,
    /// Directories referenced by generated settings; created in the snapshot.
    pub dirs: BTreeSet<String>,
    /// Files referenced by generated settings; created empty.
    pub touch: BTreeSet<String>,
}

impl<'a> Ctx<'a> {
    pub fn new(rng: &'a mut ChaCha8Rng, host: String) -> Self {
        Self {
            rng,
            host,
            dirs: BTreeSet::new(),
            touch: BTreeSet::new(),
        }
    }

    /// Weighted choice.
    pub fn pick(&mut self, choices: &[(&str, u32)]) -> String {
        let total: u32 = choices.iter().map(|c| c.1).sum();
        let mut roll = self.rng.random_range(0..total);
        for (v, w) in choices {
            if roll < *w {
                return v.to_string();
            }
            roll -= w;
        }
        unreachable!("weights sum to total")
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.rng.random_bool(p)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Family {
    pub name: &'static str,
    pub application: &'static str,
    /// Where distributions install it; `{n}` is replaced by a site name.
    pub standard_path: &'static str,
    pub render: fn(&mut Ctx<'_>) -> Doc,
}

pub const FAMILIES: [Family; 7] = [
    Family {
        name: "httpd-rhel",
        application: "httpd",
        standard_path: "/etc/httpd/conf/httpd.conf",
        render: httpd_rhel,
    },
    Family {
        name: "httpd-debian",
        application: "httpd",
        standard_path: "/etc/apache2/apache2.conf",
        render: httpd_debian,
    },
    Family {
        name: "httpd-vhost",
        application: "httpd",
        standard_path: "/etc/httpd/conf.d/{n}.conf",
        render: httpd_vhost,
    },
    Family {
        name: "nginx-main",
        application: "nginx",
        standard_path: "/etc/nginx/nginx.conf",
        render: nginx_main,
    },
    Family {
        name: "nginx-server",
        application: "nginx",
        standard_path: "/etc/nginx/conf.d/{n}.conf",
        render: nginx_server,
    },
    Family {
        name: "mysql-main",
        application: "mysql",
        standard_path: "/etc/mysql/my.cnf",
        render: mysql_main,
    },
    Family {
        name: "mysql-docker",
        application: "mysql",
        standard_path: "/etc/mysql/conf.d/{n}.cnf",
        render: mysql_docker,
    },
];

/// Locations outside any default search path; `{n}` is a site name.
pub const NONSTANDARD_DIRS: &[&str] = &[
    "/app",
    "/srv/{n}/conf",
    "/opt/{n}/etc",
    "/usr/local/{n}",
    "/config",
    "/docker/{n}",
    "/home/deploy/{n}",
    "/",
];

pub fn nonstandard_name(application: &str, family: &str, rng: &mut ChaCha8Rng) -> &'static str {
    let names: &[&str] = match (application, family) {
        ("httpd", "httpd-vhost") => &["site.conf", "vhost.conf", "default-site", "web.conf"],
        ("httpd", _) => &["httpd.conf", "apache.conf", "server.conf", "main.conf"],
        ("nginx", "nginx-server") => &["default.conf", "site.conf", "proxy.conf", "app.vhost"],
        ("nginx", _) => &["nginx.conf", "web.conf", "frontend.conf", "main.conf"],
        _ => &["my.cnf", "my-mini.cnf", "healthcheck.cnf", "cnf", "db.ini"],
    };
    names[rng.random_range(0..names.len())]
}

fn docroot(ctx: &mut Ctx<'_>) -> String {
    let d = ctx.pick(&[
        ("/var/www/html", 55),
        ("/srv/www", 25),
        ("/usr/local/apache2/htdocs", 20),
    ]);
    ctx.dirs.insert(d.clone());
    d
}

/// At most one extra directive from `pool`, rendered by `emit`.
fn optional(ctx: &mut Ctx<'_>, doc: &mut Doc, pool: &[&str], emit: fn(&mut Doc, &str)) {
    if ctx.chance(0.5) {
        let which = pool[ctx.rng.random_range(0..pool.len())];
        emit(doc, which);
    }
}

fn hash_noise(ctx: &mut Ctx<'_>, doc: &mut Doc, indent: &str, commented: &str) {
    doc.noise(ctx.rng, "#", indent, 0.35, commented);
}

fn httpd_optional(doc: &mut Doc, which: &str) {
    match which {
        "Redirect" => doc.line("Redirect /old /new"),
        "Alias" => doc.line("Alias /icons/ \"/usr/share/httpd/icons/\""),
        "Header" => doc.line("Header always set X-Frame-Options SAMEORIGIN"),
        _ => doc.line("SetEnv APP_ENV production"),
    }
}

fn httpd_rhel(ctx: &mut Ctx<'_>) -> Doc {
    let mut d = Doc::new();
    hash_noise(ctx, &mut d, "", "");
    d.setting("ServerRoot \"", "/etc/httpd", "\"");
    let listen = ctx.pick(&[("80", 95), ("8080", 5)]);
    d.setting("Listen ", &listen, "");
    hash_noise(ctx, &mut d, "", "Listen 12.34.56.78:80");
    d.line("Include conf.modules.d/*.conf");
    d.setting("User ", "apache", "");
    d.setting("Group ", "apache", "");
    let admin = ctx.pick(&[("root@localhost", 95), ("webmaster@example.com", 5)]);
    d.setting("ServerAdmin ", &admin, "");
    let name = format!("{}:80", ctx.host);
    d.setting("ServerName ", &name, "");
    d.line("<Directory />");
    d.setting("    AllowOverride ", "none", "");
    d.line("    Require all denied");
    d.line("</Directory>");
    let root = docroot(ctx);
    d.setting("DocumentRoot \"", &root, "\"");
    d.line("<IfModule dir_module>");
    d.setting("    DirectoryIndex ", "index.html", "");
    d.line("</IfModule>");
    d.line("<Files \".ht*\">");
    d.line("    Require all denied");
    d.line("</Files>");
    d.setting("ErrorLog \"", "logs/error_log", "\"");
    let level = ctx.pick(&[("warn", 70), ("info", 15), ("error", 15)]);
    d.setting("LogLevel ", &level, "");
    d.line("<IfModule log_config_module>");
    d.line("    LogFormat \"%h %l %u %t \\\"%r\\\" %>s %b\" common");
    d.setting("    CustomLog \"", "logs/access_log", "\" common");
    d.line("</IfModule>");
    d.line("<IfModule mime_module>");
    d.setting("    TypesConfig ", "/etc/mime.types", "");
    d.line("    AddType application/x-gzip .gz .tgz");
    d.line("</IfModule>");
    d.setting("AddDefaultCharset ", "UTF-8", "");
    let sendfile = ctx.pick(&[("on", 95), ("off", 5)]);
    d.setting("EnableSendfile ", &sendfile, "");
    let timeout = ctx.pick(&[("300", 50), ("60", 30), ("120", 20)]);
    d.setting("Timeout ", &timeout, "");
    let keepalive = ctx.pick(&[("On", 70), ("Off", 30)]);
    d.setting("KeepAlive ", &keepalive, "");
    let mkr = ctx.pick(&[("100", 95), ("500", 5)]);
    d.setting("MaxKeepAliveRequests ", &mkr, "");
    let kat = ctx.pick(&[("5", 60), ("15", 40)]);
    d.setting("KeepAliveTimeout ", &kat, "");
    d.setting("HostnameLookups ", "Off", "");
    let tokens = ctx.pick(&[("Prod", 50), ("OS", 30), ("Full", 20)]);
    d.setting("ServerTokens ", &tokens, "");
    d.setting("ServerSignature ", "Off", "");
    hash_noise(ctx, &mut d, "", "EnableMMAP off");
    d.line("IncludeOptional conf.d/*.conf");
    optional(ctx, &mut d, &["Redirect", "Alias", "Header", "SetEnv"], httpd_optional);
    d
}

fn httpd_debian(ctx: &mut Ctx<'_>) -> Doc {
    let mut d = Doc::new();
    hash_noise(ctx, &mut d, "", "");
    d.line("DefaultRuntimeDir ${APACHE_RUN_DIR}");
    d.setting("PidFile ", "${APACHE_PID_FILE}", "");
    let timeout = ctx.pick(&[("300", 50), ("60", 30), ("120", 20)]);
    d.setting("Timeout ", &timeout, "");
    let keepalive = ctx.pick(&[("On", 70), ("Off", 30)]);
    d.setting("KeepAlive ", &keepalive, "");
    let mkr = ctx.pick(&[("100", 95), ("500", 5)]);
    d.setting("MaxKeepAliveRequests ", &mkr, "");
    let kat = ctx.pick(&[("5", 60), ("15", 40)]);
    d.setting("KeepAliveTimeout ", &kat, "");
    d.setting("User ", "${APACHE_RUN_USER}", "");
    d.setting("Group ", "${APACHE_RUN_GROUP}", "");
    d.setting("HostnameLookups ", "Off", "");
    d.setting("ErrorLog ", "${APACHE_LOG_DIR}/error.log", "");
    let level = ctx.pick(&[("warn", 70), ("info", 15), ("error", 15)]);
    d.setting("LogLevel ", &level, "");
    d.line("IncludeOptional mods-enabled/*.load");
    d.line("IncludeOptional mods-enabled/*.conf");
    d.line("Include ports.conf");
    d.line("<Directory />");
    d.line("\tOptions FollowSymLinks");
    d.setting("\tAllowOverride ", "None", "");
    d.line("\tRequire all denied");
    d.line("</Directory>");
    d.line("<Directory /usr/share>");
    d.setting("\tAllowOverride ", "None", "");
    d.line("\tRequire all granted");
    d.line("</Directory>");
    hash_noise(ctx, &mut d, "", "<Directory /srv/>");
    d.setting("AccessFileName ", ".htaccess", "");
    d.line("<FilesMatch \"^\\.ht\">");
    d.line("\tRequire all denied");
    d.line("</FilesMatch>");
    d.line("LogFormat \"%v:%p %h %l %u %t \\\"%r\\\" %>s %O\" vhost_combined");
    d.line("LogFormat \"%h %l %u %t \\\"%r\\\" %>s %O\" common");
    let tokens = ctx.pick(&[("Prod", 50), ("OS", 30), ("Full", 20)]);
    d.setting("ServerTokens ", &tokens, "");
    d.setting("ServerSignature ", "Off", "");
    d.setting("TraceEnable ", "Off", "");
    d.line("IncludeOptional conf-enabled/*.conf");
    d.line("IncludeOptional sites-enabled/*.conf");
    optional(ctx, &mut d, &["Redirect", "Alias", "Header", "SetEnv"], httpd_optional);
    d
}

fn httpd_vhost(ctx: &mut Ctx<'_>) -> Doc {
    let mut d = Doc::new();
    hash_noise(ctx, &mut d, "", "");
    let port = ctx.pick(&[("80", 95), ("8080", 5)]);
    // section arguments become part of the key, so they are not injectable
    d.line(format!("<VirtualHost *:{port}>"));
    let host = ctx.host.clone();
    d.setting("    ServerName ", &host, "");
    d.setting("    ServerAlias www.", &host, "");
    let admin = ctx.pick(&[("webmaster@localhost", 95), ("admin@example.com", 5)]);
    d.setting("    ServerAdmin ", &admin, "");
    let root = docroot(ctx);
    d.setting("    DocumentRoot ", &root, "");
    d.setting("    ErrorLog ", "${APACHE_LOG_DIR}/error.log", "");
    d.setting("    CustomLog ", "${APACHE_LOG_DIR}/access.log", " combined");
    let level = ctx.pick(&[("warn", 70), ("info", 15), ("error", 15)]);
    d.setting("    LogLevel ", &level, "");
    hash_noise(ctx, &mut d, "    ", "Include conf-available/serve-cgi-bin.conf");
    d.line(format!("    <Directory {root}>"));
    d.line("        Options Indexes FollowSymLinks");
    let ao = ctx.pick(&[("All", 60), ("None", 40)]);
    d.setting("        AllowOverride ", &ao, "");
    d.line("        Require all granted");
    d.setting("        DirectoryIndex ", "index.html", " index.php");
    d.line("    </Directory>");
    d.line("    <IfModule mod_rewrite.c>");
    d.setting("        RewriteEngine ", "On", "");
    d.line("        RewriteCond %{HTTPS} off");
    d.line("        RewriteRule ^/?(.*) https://%{SERVER_NAME}/$1 [R,L]");
    d.line("    </IfModule>");
    d.line("    Header set X-Content-Type-Options nosniff");
    d.line("    SetEnvIf Request_URI \"^/health\" dontlog");
    d.line("    Alias /static/ /var/www/static/");
    d.line("    <Location /server-status>");
    d.line("        SetHandler server-status");
    d.line("        Require local");
    d.line("    </Location>");
    d.line("    ErrorDocument 404 /404.html");
    d.line("</VirtualHost>");
    optional(ctx, &mut d, &["Redirect", "SetEnv"], httpd_optional);
    d
}

fn nginx_optional(doc: &mut Doc, which: &str) {
    match which {
        "gzip_types" => doc.line("    gzip_types text/plain application/json;"),
        "server_names_hash_bucket_size" => doc.line("    server_names_hash_bucket_size 64;"),
        _ => doc.line("    ssl_protocols TLSv1.2 TLSv1.3;"),
    }
}

fn upstream(ctx: &mut Ctx<'_>) -> String {
    ctx.pick(&[
        ("http://127.0.0.1:8080", 45),
        ("http://backend:3000", 35),
        ("http://app:5000", 20),
    ])
}

fn nginx_main(ctx: &mut Ctx<'_>) -> Doc {
    let mut d = Doc::new();
    hash_noise(ctx, &mut d, "", "");
    d.setting("user ", "nginx", ";");
    let wp = ctx.pick(&[("auto", 50), ("1", 20), ("2", 15), ("4", 15)]);
    d.setting("worker_processes ", &wp, ";");
    d.setting("error_log ", "/var/log/nginx/error.log", " warn;");
    d.setting("pid ", "/var/run/nginx.pid", ";");
    d.blank();
    d.line("events {");
    let wc = ctx.pick(&[("1024", 50), ("768", 20), ("4096", 15), ("2048", 15)]);
    d.setting("    worker_connections ", &wc, ";");
    d.line("}");
    d.blank();
    d.line("http {");
    d.line("    include /etc/nginx/mime.types;");
    d.setting("    default_type ", "application/octet-stream", ";");
    hash_noise(ctx, &mut d, "    ", "tcp_nopush on;");
    d.line("    log_format main '$remote_addr - $remote_user [$time_local] \"$request\" $status';");
    d.setting("    access_log ", "/var/log/nginx/access.log", " main;");
    let sendfile = ctx.pick(&[("on", 95), ("off", 5)]);
    d.setting("    sendfile ", &sendfile, ";");
    d.setting("    tcp_nopush ", "on", ";");
    d.setting("    tcp_nodelay ", "on", ";");
    let ka = ctx.pick(&[("65", 60), ("75", 40)]);
    d.setting("    keepalive_timeout ", &ka, ";");
    d.setting("    types_hash_max_size ", "2048", ";");
    let gzip = ctx.pick(&[("on", 60), ("off", 40)]);
    d.setting("    gzip ", &gzip, ";");
    d.setting("    server_tokens ", "off", ";");
    let body = ctx.pick(&[("1m", 50), ("10m", 30), ("100m", 20)]);
    d.setting("    client_max_body_size ", &body, ";");
    d.line("    include /etc/nginx/conf.d/*.conf;");
    optional(
        ctx,
        &mut d,
        &["gzip_types", "server_names_hash_bucket_size", "ssl_protocols"],
        nginx_optional,
    );
    d.line("    server {");
    let listen = ctx.pick(&[("80", 95), ("8080", 5)]);
    d.setting("        listen ", &listen, ";");
    let host = ctx.host.clone();
    d.setting("        server_name ", &host, ";");
    let root = ctx.pick(&[("/usr/share/nginx/html", 60), ("/var/www/html", 25), ("/srv/www", 15)]);
    ctx.dirs.insert(root.clone());
    d.setting("        root ", &root, ";");
    d.setting("        index ", "index.html", " index.htm;");
    d.line("        location / {");
    d.line("            try_files $uri $uri/ =404;");
    d.line("        }");
    d.line("        location /api/ {");
    let up = upstream(ctx);
    d.setting("            proxy_pass ", &up, ";");
    d.line("            proxy_set_header Host $host;");
    d.line("        }");
    d.line("        error_page 500 502 503 504 /50x.html;");
    d.line("    }");
    d.line("}");
    d
}

fn nginx_server(ctx: &mut Ctx<'_>) -> Doc {
    let mut d = Doc::new();
    hash_noise(ctx, &mut d, "", "");
    d.line("server {");
    let listen = ctx.pick(&[("80", 95), ("8080", 5)]);
    d.setting("    listen ", &listen, ";");
    d.line("    listen [::]:80;");
    let host = ctx.host.clone();
    d.setting("    server_name ", &host, ";");
    let root = ctx.pick(&[("/usr/share/nginx/html", 60), ("/var/www/html", 25), ("/srv/www", 15)]);
    ctx.dirs.insert(root.clone());
    d.setting("    root ", &root, ";");
    d.setting("    index ", "index.html", " index.php;");
    d.setting("    charset ", "utf-8", ";");
    d.setting("    access_log ", "/var/log/nginx/host.access.log", " main;");
    d.setting("    error_log ", "/var/log/nginx/host.error.log", ";");
    let body = ctx.pick(&[("1m", 50), ("10m", 30), ("100m", 20)]);
    d.setting("    client_max_body_size ", &body, ";");
    hash_noise(ctx, &mut d, "    ", "return 301 https://$host$request_uri;");
    d.line("    location / {");
    d.line("        try_files $uri $uri/ /index.php?$query_string;");
    d.line("    }");
    d.line("    location ~ \\.php$ {");
    d.line("        fastcgi_pass 127.0.0.1:9000;");
    d.line("        fastcgi_index index.php;");
    d.line("        fastcgi_param SCRIPT_FILENAME $document_root$fastcgi_script_name;");
    d.line("        include fastcgi_params;");
    d.line("    }");
    d.line("    location /api/ {");
    let up = upstream(ctx);
    d.setting("        proxy_pass ", &up, ";");
    d.line("        proxy_set_header X-Real-IP $remote_addr;");
    let prt = ctx.pick(&[("60s", 70), ("300s", 30)]);
    d.setting("        proxy_read_timeout ", &prt, ";");
    d.line("        proxy_http_version 1.1;");
    d.line("    }");
    d.line("    location ~ /\\.ht {");
    d.line("        deny all;");
    d.line("    }");
    d.line("    error_page 500 502 503 504 /50x.html;");
    d.setting("    add_header ", "X-Frame-Options", " SAMEORIGIN;");
    d.setting("    expires ", "7d", ";");
    d.line("}");
    optional(ctx, &mut d, &["gzip_types", "ssl_protocols"], |doc, w| {
        let mut inner = Doc::new();
        nginx_optional(&mut inner, w);
        doc.line(inner.render().trim());
    });
    d
}

/// Shared by both MySQL families: port and socket agree between the client
/// and server sections, and the slow log lives under the data directory.
struct MysqlBasics {
    port: String,
    socket: String,
    datadir: String,
}

fn mysql_basics(ctx: &mut Ctx<'_>) -> MysqlBasics {
    let port = ctx.pick(&[("3306", 70), ("3307", 15), ("13306", 15)]);
    let socket = ctx.pick(&[("/var/run/mysqld/mysqld.sock", 80), ("/tmp/mysql.sock", 20)]);
    let datadir = ctx.pick(&[("/var/lib/mysql", 70), ("/data/mysql", 30)]);
    ctx.dirs.insert(datadir.clone());
    MysqlBasics { port, socket, datadir }
}

fn ini_noise(ctx: &mut Ctx<'_>, d: &mut Doc, commented: &str) {
    d.noise(ctx.rng, "#", "", 0.3, commented);
}

fn mysql_optional(doc: &mut Doc, which: &str) {
    match which {
        "performance_schema" => doc.line("performance_schema = OFF"),
        "local-infile" => doc.line("local-infile = 0"),
        _ => doc.line("explicit_defaults_for_timestamp = 1"),
    }
}

fn mysql_main(ctx: &mut Ctx<'_>) -> Doc {
    let b = mysql_basics(ctx);
    let mut d = Doc::new();
    ini_noise(ctx, &mut d, "");
    d.line("[client]");
    d.setting("port = ", &b.port, "");
    d.setting("socket = ", &b.socket, "");
    d.blank();
    d.line("[mysqld_safe]");
    d.setting("socket = ", &b.socket, "");
    d.setting("nice = ", "0", "");
    d.blank();
    d.line("[mysqld]");
    d.setting("user = ", "mysql", "");
    d.setting("pid-file = ", "/var/run/mysqld/mysqld.pid", "");
    d.setting("socket = ", &b.socket, "");
    d.setting("port = ", &b.port, "");
    d.setting("basedir = ", "/usr", "");
    d.setting("datadir = ", &b.datadir, "");
    d.setting("tmpdir = ", "/tmp", "");
    d.setting("lc-messages-dir = ", "/usr/share/mysql", "");
    d.line("skip-external-locking");
    let bind = ctx.pick(&[("127.0.0.1", 60), ("0.0.0.0", 40)]);
    d.setting("bind-address = ", &bind, "");
    ini_noise(ctx, &mut d, "key_buffer = 16M");
    let kb = ctx.pick(&[("16M", 95), ("32M", 5)]);
    d.setting("key_buffer_size = ", &kb, "");
    let map = ctx.pick(&[("16M", 50), ("64M", 50)]);
    d.setting("max_allowed_packet = ", &map, "");
    d.setting("thread_stack = ", "192K", "");
    let tcs = ctx.pick(&[("8", 50), ("16", 50)]);
    d.setting("thread_cache_size = ", &tcs, "");
    d.setting("myisam-recover-options = ", "BACKUP", "");
    let mc = ctx.pick(&[("151", 50), ("500", 30), ("1000", 20)]);
    d.setting("max_connections = ", &mc, "");
    d.setting("log_error = ", "/var/log/mysql/error.log", "");
    let eld = ctx.pick(&[("10", 60), ("7", 40)]);
    d.setting("expire_logs_days = ", &eld, "");
    d.setting("max_binlog_size = ", "100M", "");
    let cs = ctx.pick(&[("utf8mb4", 60), ("utf8", 40)]);
    d.setting("character-set-server = ", &cs, "");
    let coll = if cs == "utf8" {
        "utf8_general_ci"
    } else {
        "utf8mb4_unicode_ci"
    };
    d.setting("collation-server = ", coll, "");
    let ibp = ctx.pick(&[("128M", 50), ("1G", 30), ("256M", 20)]);
    d.setting("innodb_buffer_pool_size = ", &ibp, "");
    let ilf = ctx.pick(&[("48M", 60), ("512M", 40)]);
    d.setting("innodb_log_file_size = ", &ilf, "");
    let slow = format!("{}/slow.log", b.datadir);
    ctx.touch.insert(slow.clone());
    d.setting("slow_query_log_file = ", &slow, "");
    optional(
        ctx,
        &mut d,
        &["performance_schema", "local-infile", "explicit_defaults_for_timestamp"],
        mysql_optional,
    );
    d.blank();
    d.line("[mysqldump]");
    d.line("quick");
    d.line("quote-names");
    d.setting("max_allowed_packet = ", "16M", "");
    d.blank();
    d.line("!includedir /etc/mysql/conf.d/");
    d
}

fn mysql_docker(ctx: &mut Ctx<'_>) -> Doc {
    let b = mysql_basics(ctx);
    let mut d = Doc::new();
    ini_noise(ctx, &mut d, "");
    d.line("[mysqld]");
    d.line("skip-host-cache");
    d.line("skip-name-resolve");
    d.setting("datadir = ", &b.datadir, "");
    d.setting("socket = ", &b.socket, "");
    d.setting("secure-file-priv = ", "/var/lib/mysql-files", "");
    d.setting("user = ", "mysql", "");
    d.setting("pid-file = ", "/var/run/mysqld/mysqld.pid", "");
    d.setting("port = ", &b.port, "");
    let bind = ctx.pick(&[("127.0.0.1", 60), ("0.0.0.0", 40)]);
    d.setting("bind-address = ", &bind, "");
    let mc = ctx.pick(&[("151", 50), ("500", 30), ("1000", 20)]);
    d.setting("max_connections = ", &mc, "");
    let cs = ctx.pick(&[("utf8mb4", 60), ("utf8", 40)]);
    d.setting("character-set-server = ", &cs, "");
    let coll = if cs == "utf8" {
        "utf8_general_ci"
    } else {
        "utf8mb4_unicode_ci"
    };
    d.setting("collation-server = ", coll, "");
    d.setting("default-storage-engine = ", "InnoDB", "");
    let ibp = ctx.pick(&[("128M", 50), ("1G", 30), ("256M", 20)]);
    d.setting("innodb_buffer_pool_size = ", &ibp, "");
    let flush = ctx.pick(&[("1", 60), ("2", 40)]);
    d.setting("innodb_flush_log_at_trx_commit = ", &flush, "");
    d.setting("innodb_file_per_table = ", "1", "");
    let map = ctx.pick(&[("16M", 50), ("64M", 50)]);
    d.setting("max_allowed_packet = ", &map, "");
    ini_noise(ctx, &mut d, "sql_mode = STRICT_ALL_TABLES");
    d.setting("sql_mode = ", "STRICT_TRANS_TABLES,NO_ENGINE_SUBSTITUTION", "");
    let sql = ctx.pick(&[("1", 50), ("0", 50)]);
    d.setting("slow_query_log = ", &sql, "");
    let slow = format!("{}/slow.log", b.datadir);
    ctx.touch.insert(slow.clone());
    d.setting("slow_query_log_file = ", &slow, "");
    let lqt = ctx.pick(&[("2", 70), ("5", 30)]);
    d.setting("long_query_time = ", &lqt, "");
    d.setting("log_error = ", "/var/log/mysql/error.log", "");
    d.setting("symbolic-links = ", "0", "");
    optional(
        ctx,
        &mut d,
        &["performance_schema", "local-infile", "explicit_defaults_for_timestamp"],
        mysql_optional,
    );
    d.blank();
    d.line("[client]");
    d.setting("port = ", &b.port, "");
    d.setting("socket = ", &b.socket, "");
    d.setting("default-character-set = ", &cs, "");
    d.blank();
    d.line("[mysql]");
    d.setting("default-character-set = ", &cs, "");
    d
}
