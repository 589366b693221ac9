import jacobilab.cli

if __name__ == "__main__":
    jacobilab.cli.main()
