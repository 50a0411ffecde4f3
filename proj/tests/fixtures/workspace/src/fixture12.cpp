unsigned short currentTick() {
    return 4261;
}

int getSomeValue() {
    unsigned short raw = currentTick();
    return raw % 10;
}

void consumeValue() {
    long long bigNumber = getSomeValue();
    int smallerNumber = bigNumber;
    long long keepAlive = smallerNumber;
    keepAlive = keepAlive + 12;
}
