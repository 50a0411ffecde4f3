long long answerCode() {
    return 42;
}

void storeAnswer() {
    int code = answerCode();
    long long wide = code;
    wide = wide + 1;
}
