use std::io::BufReader;
use std::path::PathBuf;

use clap::ValueEnum;
use percolimit::codec::{
    contour_fn, decode_lukaciewicz, height_fn, lukaciewicz, rescale, rescale_contour, LatticePath, Rescaled,
};
use percolimit::trees::PlaneTree;

use super::{read_text, write_text, write_with, Context};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Encoding {
    Lukaciewicz,
    Height,
    Contour,
}

#[derive(Debug, clap::Args)]
pub struct Args {
    /// A `.pt` tree, or a Lukaciewicz CSV with `--decode`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "lukaciewicz")]
    encoding: Encoding,
    /// Rescale to `t -> X(k² t)/k` (`C(2k² t)/k` for the contour).
    #[arg(long)]
    k: Option<f64>,
    /// Decode a Lukaciewicz CSV back into a `.pt` tree.
    #[arg(long)]
    decode: bool,
    #[arg(long)]
    out: PathBuf,
}

pub fn run(_ctx: &Context, args: Args) -> Result<(), CliError> {
    if args.decode {
        if args.encoding != Encoding::Lukaciewicz || args.k.is_some() {
            return Err(CliError::Usage(
                "decode: only unscaled Lukaciewicz paths can be decoded".into(),
            ));
        }
        let f = std::fs::File::open(&args.input).map_err(|e| CliError::Io(format!("{}: {e}", args.input.display())))?;
        let path = LatticePath::read_csv(BufReader::new(f)).map_err(|e| located(&args.input, e))?;
        let tree = decode_lukaciewicz(&path).map_err(|e| located(&args.input, e))?;
        return write_text(&args.out, &tree.to_pt_string());
    }
    let tree = PlaneTree::parse_pt(&read_text(&args.input)?).map_err(|e| located(&args.input, e))?;
    let path = match args.encoding {
        Encoding::Lukaciewicz => lukaciewicz(&tree),
        Encoding::Height => height_fn(&tree),
        Encoding::Contour => contour_fn(&tree),
    };
    let view = match (args.k, args.encoding) {
        (None, _) => Rescaled::identity(&path),
        (Some(k), Encoding::Contour) => rescale_contour(&path, k).map_err(|e| CliError::Usage(format!("k: {e}")))?,
        (Some(k), _) => rescale(&path, k, 2.0).map_err(|e| CliError::Usage(format!("k: {e}")))?,
    };
    write_with(&args.out, |w| view.write_csv(w))
}

fn located(path: &std::path::Path, e: percolimit::Error) -> CliError {
    match e {
        percolimit::Error::Io(e) => CliError::Io(format!("{}: {e}", path.display())),
        e => CliError::Usage(format!("{}: {e}", path.display())),
    }
}
