entity_dic["PER"] = ["Bob Hope"]
entity_dic["TIME"] = ["1903"]
chain_dic[0] = [["Bob Hope"], "PER"]
chain_dic[1] = [["1903"], "TIME"]
relation_dic["born in"] = [[0, 1]]
grounding_dic["Img_1"] = [["PER", 0.5000, 0.5000, 0.4000, 0.4000]]
