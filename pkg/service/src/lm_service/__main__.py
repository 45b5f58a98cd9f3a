"""Run the service: python -m lm_service [--host H] [--port P]."""

import argparse
import os

import uvicorn

from .app import create_app


def main():
    parser = argparse.ArgumentParser(prog="lm-service")
    parser.add_argument("--host", default=os.environ.get("LM_SERVICE_HOST", "127.0.0.1"))
    parser.add_argument("--port", type=int,
                        default=int(os.environ.get("LM_SERVICE_PORT", "8741")))
    parser.add_argument("--masked-model", default=None)
    parser.add_argument("--causal-model", default=None)
    args = parser.parse_args()
    app = create_app(args.masked_model, args.causal_model, load="background")
    uvicorn.run(app, host=args.host, port=args.port)


if __name__ == "__main__":
    main()
