use super::{ConfigFormat, ConfigNode, ConfigTree, SyntaxError, ARG_KEY};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Word(String),
    Semicolon,
    Open,
    Close,
}

fn tokenize(content: &str) -> Result<Vec<(usize, Token)>, SyntaxError> {
    let mut tokens = Vec::new();
    let mut line = 1;
    let mut chars = content.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '\n' => {
                line += 1;
                chars.next();
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            '#' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    chars.next();
                }
            }
            ';' => {
                tokens.push((line, Token::Semicolon));
                chars.next();
            }
            '{' => {
                tokens.push((line, Token::Open));
                chars.next();
            }
            '}' => {
                tokens.push((line, Token::Close));
                chars.next();
            }
            '"' | '\'' => {
                let start = line;
                chars.next();
                let mut word = String::new();
                let mut closed = false;
                while let Some(ch) = chars.next() {
                    match ch {
                        '\\' => {
                            if let Some(n) = chars.next() {
                                if n != c && n != '\\' {
                                    word.push('\\');
                                }
                                if n == '\n' {
                                    line += 1;
                                }
                                word.push(n);
                            }
                        }
                        ch if ch == c => {
                            closed = true;
                            break;
                        }
                        ch => {
                            if ch == '\n' {
                                line += 1;
                            }
                            word.push(ch);
                        }
                    }
                }
                if !closed {
                    return Err(SyntaxError::new(start, "unterminated quoted string"));
                }
                tokens.push((start, Token::Word(word)));
            }
            _ => {
                let mut word = String::new();
                let mut in_var = false;
                while let Some(&ch) = chars.peek() {
                    if ch.is_whitespace() || ch == ';' {
                        break;
                    }
                    // `${name}` stays inside the word
                    if ch == '{' {
                        if word.ends_with('$') {
                            in_var = true;
                        } else {
                            break;
                        }
                    } else if ch == '}' {
                        if in_var {
                            in_var = false;
                        } else {
                            break;
                        }
                    }
                    word.push(ch);
                    chars.next();
                }
                tokens.push((line, Token::Word(word)));
            }
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
}

impl Parser {
    fn block(&mut self, depth: usize, open_line: usize) -> Result<Vec<ConfigNode>, SyntaxError> {
        let mut nodes = Vec::new();
        loop {
            let Some((line, token)) = self.tokens.get(self.pos).cloned() else {
                if depth > 0 {
                    return Err(SyntaxError::new(open_line, "unbalanced `{`: block is never closed"));
                }
                return Ok(nodes);
            };
            self.pos += 1;
            match token {
                Token::Close => {
                    if depth == 0 {
                        return Err(SyntaxError::new(line, "unexpected `}`"));
                    }
                    return Ok(nodes);
                }
                Token::Semicolon => return Err(SyntaxError::new(line, "unexpected `;`")),
                Token::Open => return Err(SyntaxError::new(line, "unexpected `{`")),
                Token::Word(name) => nodes.push(self.statement(name, line, depth)?),
            }
        }
    }

    fn statement(&mut self, name: String, line: usize, depth: usize) -> Result<ConfigNode, SyntaxError> {
        let mut args = Vec::new();
        loop {
            let Some((tline, token)) = self.tokens.get(self.pos).cloned() else {
                return Err(SyntaxError::new(line, format!("directive `{name}` is missing `;`")));
            };
            self.pos += 1;
            match token {
                Token::Word(w) => args.push(w),
                Token::Semicolon => {
                    let value = if args.is_empty() { None } else { Some(args.join(" ")) };
                    return Ok(ConfigNode::new(name, value));
                }
                Token::Open => {
                    let mut children: Vec<ConfigNode> =
                        args.into_iter().map(|a| ConfigNode::leaf(ARG_KEY, a)).collect();
                    children.extend(self.block(depth + 1, tline)?);
                    return Ok(ConfigNode::new(name, None).with_children(children));
                }
                Token::Close => {
                    return Err(SyntaxError::new(tline, format!("directive `{name}` is missing `;`")));
                }
            }
        }
    }
}

/// Parses nginx syntax: `name args;` statements become leaves whose value is the
/// space-joined arguments, `name args { ... }` blocks become section nodes with
/// `arg` children followed by the nested statements.
pub fn parse_nginx(content: &str) -> Result<ConfigTree, SyntaxError> {
    let tokens = tokenize(content)?;
    let mut parser = Parser { tokens, pos: 0 };
    let nodes = parser.block(0, 0)?;
    Ok(ConfigTree::new(ConfigFormat::Nginx, "", nodes))
}
