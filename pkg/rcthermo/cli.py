#!/usr/bin/env python3
import sys


def main(argv=None):
    try:
        from rcthermo import app

        return app.main(argv)

    except KeyboardInterrupt:
        print("\nInterrupted", file=sys.stderr)
        return 130
    except Exception as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
